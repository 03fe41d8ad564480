#pragma once

#include "cqapprox/model.hpp"
#include "cqapprox/structure.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cqa {

/// A homomorphism given by element names, total on the source elements.
using Hom = std::map<std::string, std::string>;

/// Backtracking homomorphism search between two structures.
///
/// Every source fact in scope is a constraint; domains are kept generalized
/// arc consistent after every decision, and the branching variable is the
/// one with the smallest domain (lowest id on ties). Values are tried in
/// increasing element order, so the first solution is reproducible.
class HomSearch
{
public:
    HomSearch(const Structure & source, const Structure & target);

    /// Only these source facts are constraints (default: all facts).
    void restrict_facts(std::vector<int> fact_ids);
    /// Only these source elements are assigned (default: all elements).
    /// Facts in scope must only mention such elements.
    void restrict_elements(std::vector<int> elements);
    /// Pins a source element; returns false on a conflicting earlier pin.
    bool fix(int source_element, int target_element);
    /// Intersects the domain of a source element with `allowed`.
    void restrict_domain(int source_element, const std::vector<int> & allowed);
    /// Requires distinct source elements to receive distinct images.
    void set_injective(bool injective) { injective_ = injective; }

    /// First solution, as a vector indexed by source element (-1 outside scope).
    std::optional<std::vector<int>> find();

    /// Enumerates solutions distinct on `projection`; for each distinct
    /// projection one full witness is passed to `visit`. Stops early when
    /// `visit` returns false.
    void for_each(const std::vector<int> & projection, const std::function<bool(const std::vector<int> &)> & visit);

    /// Number of search nodes expanded by the last call.
    std::size_t nodes_expanded() const { return nodes_; }

private:
    using Domains = std::vector<std::vector<char>>;

    void prepare();
    bool propagate(Domains & dom, std::vector<int> & sizes, std::vector<int> queue) const;
    int pick(const std::vector<int> & sizes, const std::vector<int> & candidates) const;
    bool assign(Domains & dom, std::vector<int> & sizes, int element, int value) const;
    std::vector<int> solution(const Domains & dom) const;
    std::optional<std::vector<int>> complete(const Domains & dom, const std::vector<int> & sizes);
    bool enumerate(const Domains & dom, const std::vector<int> & sizes, const std::vector<int> & projection,
                   const std::function<bool(const std::vector<int> &)> & visit);

    const Structure & source_;
    const Structure & target_;
    std::vector<int> relation_map_;
    std::vector<int> facts_;
    std::vector<int> elements_;
    std::vector<char> in_scope_;
    std::vector<std::vector<int>> facts_of_element_;
    Domains initial_;
    std::vector<int> initial_sizes_;
    bool prepared_ = false;
    bool infeasible_ = false;
    bool injective_ = false;
    std::vector<std::pair<int, int>> pins_;
    std::vector<std::pair<int, std::vector<int>>> restrictions_;
    std::size_t nodes_ = 0;
};

/// Homomorphism from (source, src_tuple) to (target, tgt_tuple), if any.
/// Throws ArityError when the anchor tuples differ in length.
std::optional<Hom> find_hom(const Structure & source, const Tuple & src_tuple, const Structure & target,
                            const Tuple & tgt_tuple);
std::optional<Hom> find_hom(const ConjunctiveQuery & source, const ConjunctiveQuery & target);
std::optional<Hom> find_hom(const ConjunctiveQuery & source, const Database & target, const Tuple & tgt_tuple);

/// Checks that `h` maps every source fact onto a target fact and the anchors onto each other.
bool is_homomorphism(const Structure & source, const Tuple & src_tuple, const Structure & target,
                     const Tuple & tgt_tuple, const Hom & h);

/// q(D): all answer tuples, sorted.
std::set<Tuple> evaluate(const ConjunctiveQuery & q, const Database & db);
bool evaluates_to(const ConjunctiveQuery & q, const Database & db, const Tuple & tuple);

/// q ⊆ q2, i.e. (q2, x̄2) → (q, x̄).
bool contains(const ConjunctiveQuery & q, const ConjunctiveQuery & q2);
bool equivalent(const ConjunctiveQuery & q, const ConjunctiveQuery & q2);

/// Core of q: an equivalent retract with the fewest atoms, fixing the head
/// pointwise. Repeatedly removes the first atom (canonical order) that q
/// can be mapped away from, replacing q by the image of that map.
ConjunctiveQuery core(const ConjunctiveQuery & q);
bool is_core(const ConjunctiveQuery & q);

/// All homomorphisms from q to itself, ordered by their image vectors
/// (variables in canonical order).
std::vector<Hom> endomorphisms(const ConjunctiveQuery & q);

/// Isomorphism test (bijective renaming matching heads position-wise).
bool isomorphic(const ConjunctiveQuery & q, const ConjunctiveQuery & q2);

} // namespace cqa
