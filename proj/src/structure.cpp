#include "cqapprox/structure.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace cqa {

Structure Structure::from_atoms(const std::vector<Atom> & atoms, const std::vector<std::string> & extra_elements)
{
    Structure s;
    std::set<std::string> names(extra_elements.begin(), extra_elements.end());
    std::set<std::string> rels;
    for (const auto & a : atoms) {
        names.insert(a.args.begin(), a.args.end());
        rels.insert(a.relation);
    }
    s.names_.assign(names.begin(), names.end());
    for (std::size_t i = 0; i < s.names_.size(); ++i)
        s.ids_.emplace(s.names_[i], static_cast<int>(i));
    s.relations_.assign(rels.begin(), rels.end());
    s.arities_.assign(s.relations_.size(), 0);
    for (std::size_t i = 0; i < s.relations_.size(); ++i)
        s.relation_ids_.emplace(s.relations_[i], static_cast<int>(i));

    auto schema = schema_of(atoms);
    for (const auto & [rel, ar] : schema)
        s.arities_[s.relation_ids_.at(rel)] = ar;

    std::vector<Atom> sorted = atoms;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const auto & a : sorted) {
        Fact f;
        f.relation = s.relation_ids_.at(a.relation);
        for (const auto & t : a.args)
            f.args.push_back(s.ids_.at(t));
        s.facts_.push_back(std::move(f));
    }
    s.index();
    return s;
}

Structure Structure::from_query(const ConjunctiveQuery & q)
{
    return from_atoms(q.atoms(), q.head());
}

Structure Structure::from_database(const Database & db)
{
    return from_atoms(db.facts());
}

void Structure::index()
{
    by_relation_.assign(relations_.size(), {});
    by_element_.assign(names_.size(), {});
    for (int id = 0; id < static_cast<int>(facts_.size()); ++id) {
        const auto & f = facts_[id];
        by_relation_[f.relation].push_back(id);
        for (int e : f.args)
            if (by_element_[e].empty() || by_element_[e].back() != id)
                by_element_[e].push_back(id);
        fact_index_.emplace(std::make_pair(f.relation, f.args), id);
    }
}

std::optional<int> Structure::element(const std::string & name) const
{
    auto it = ids_.find(name);
    if (it == ids_.end())
        return std::nullopt;
    return it->second;
}

std::optional<int> Structure::relation(const std::string & name) const
{
    auto it = relation_ids_.find(name);
    if (it == relation_ids_.end())
        return std::nullopt;
    return it->second;
}

bool Structure::has_fact(int relation, const std::vector<int> & args) const
{
    return fact_index_.contains(std::make_pair(relation, args));
}

std::vector<int> Structure::relation_map_from(const Structure & other) const
{
    std::vector<int> map(other.relations_.size(), -1);
    for (std::size_t r = 0; r < other.relations_.size(); ++r) {
        auto mine = relation(other.relations_[r]);
        if (mine && arities_[*mine] == other.arities_[r])
            map[r] = *mine;
    }
    return map;
}

std::vector<int> Structure::elements_of(const Tuple & tuple) const
{
    std::vector<int> out;
    out.reserve(tuple.size());
    for (const auto & t : tuple) {
        auto e = element(t);
        if (!e)
            throw std::invalid_argument("unknown element '" + t + "'");
        out.push_back(*e);
    }
    return out;
}

Tuple Structure::names_of(const std::vector<int> & elements) const
{
    Tuple out;
    for (int e : elements)
        out.push_back(names_[e]);
    return out;
}

} // namespace cqa
