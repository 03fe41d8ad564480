#pragma once

#include "cqapprox/model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cqa {

/// Integer-indexed relational structure used by the search engines.
///
/// Elements are numbered in sorted name order, so iteration order is the
/// canonical order of variables (for queries) or constants (for databases).
/// A query and its canonical database produce identical structures up to
/// the element names.
class Structure
{
public:
    struct Fact
    {
        int relation;
        std::vector<int> args;
    };

    static Structure from_query(const ConjunctiveQuery & q);
    static Structure from_database(const Database & db);
    /// Arbitrary atoms plus extra isolated elements.
    static Structure from_atoms(const std::vector<Atom> & atoms, const std::vector<std::string> & extra_elements = {});

    int element_count() const { return static_cast<int>(names_.size()); }
    const std::string & name(int element) const { return names_[element]; }
    const std::vector<std::string> & names() const { return names_; }
    std::optional<int> element(const std::string & name) const;

    const std::vector<Fact> & facts() const { return facts_; }
    const std::vector<std::string> & relations() const { return relations_; }
    std::optional<int> relation(const std::string & name) const;
    std::size_t arity(int relation) const { return arities_[relation]; }

    /// Fact ids of a relation.
    const std::vector<int> & facts_of(int relation) const { return by_relation_[relation]; }
    /// Fact ids mentioning an element (each id once).
    const std::vector<int> & facts_with(int element) const { return by_element_[element]; }

    bool has_fact(int relation, const std::vector<int> & args) const;

    /// Maps relation ids of `other` into this structure (-1 when absent).
    std::vector<int> relation_map_from(const Structure & other) const;

    /// Translates names to element ids; throws std::invalid_argument when a
    /// name is unknown.
    std::vector<int> elements_of(const Tuple & tuple) const;
    Tuple names_of(const std::vector<int> & elements) const;

private:
    void index();

    std::vector<std::string> names_;
    std::map<std::string, int> ids_;
    std::vector<std::string> relations_;
    std::map<std::string, int> relation_ids_;
    std::vector<std::size_t> arities_;
    std::vector<Fact> facts_;
    std::vector<std::vector<int>> by_relation_;
    std::vector<std::vector<int>> by_element_;
    std::map<std::pair<int, std::vector<int>>, int> fact_index_;
};

} // namespace cqa
