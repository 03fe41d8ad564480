#pragma once
// Brute-force reference implementations. Deliberately naive: they enumerate
// all assignments and share no code with the library's search engines.

#include "cqapprox/model.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using cqa::Atom;
using cqa::ConjunctiveQuery;
using Assignment = std::map<std::string, std::string>;

inline std::set<Atom> atom_set(const std::vector<Atom> & atoms)
{
    return {atoms.begin(), atoms.end()};
}

inline std::vector<std::string> names_in(const std::vector<Atom> & atoms, const std::vector<std::string> & extra = {})
{
    std::set<std::string> out(extra.begin(), extra.end());
    for (const auto & a : atoms)
        out.insert(a.args.begin(), a.args.end());
    return {out.begin(), out.end()};
}

// Calls visit for every total map from `from` into `to` respecting `fixed`;
// stops when visit returns false.
inline void all_maps(const std::vector<std::string> & from, const std::vector<std::string> & to, Assignment fixed,
                     const std::function<bool(const Assignment &)> & visit)
{
    std::vector<std::string> free;
    for (const auto & v : from)
        if (!fixed.count(v))
            free.push_back(v);
    if (!free.empty() && to.empty())
        return;
    std::vector<std::size_t> idx(free.size(), 0);
    for (;;) {
        Assignment m = fixed;
        for (std::size_t i = 0; i < free.size(); ++i)
            m[free[i]] = to[idx[i]];
        if (!visit(m))
            return;
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == to.size())
            idx[i++] = 0;
        if (i == idx.size())
            return;
    }
}

inline bool maps_atoms(const std::vector<Atom> & src, const std::set<Atom> & tgt, const Assignment & m)
{
    for (const auto & a : src) {
        Atom img{a.relation, {}};
        for (const auto & t : a.args)
            img.args.push_back(m.at(t));
        if (!tgt.count(img))
            return false;
    }
    return true;
}

// All homomorphisms (src atoms, src anchors) -> (tgt atoms, tgt anchors).
inline std::vector<Assignment> homs(const std::vector<Atom> & src, const std::vector<std::string> & src_anchor,
                                    const std::vector<Atom> & tgt, const std::vector<std::string> & tgt_anchor)
{
    std::vector<Assignment> out;
    Assignment fixed;
    for (std::size_t i = 0; i < src_anchor.size(); ++i) {
        auto it = fixed.find(src_anchor[i]);
        if (it != fixed.end() && it->second != tgt_anchor[i])
            return out;
        fixed[src_anchor[i]] = tgt_anchor[i];
    }
    auto tset = atom_set(tgt);
    all_maps(names_in(src, src_anchor), names_in(tgt, tgt_anchor), fixed, [&](const Assignment & m) {
        if (maps_atoms(src, tset, m))
            out.push_back(m);
        return true;
    });
    return out;
}

inline bool hom_exists(const std::vector<Atom> & src, const std::vector<std::string> & src_anchor,
                       const std::vector<Atom> & tgt, const std::vector<std::string> & tgt_anchor)
{
    bool found = false;
    Assignment fixed;
    for (std::size_t i = 0; i < src_anchor.size(); ++i) {
        auto it = fixed.find(src_anchor[i]);
        if (it != fixed.end() && it->second != tgt_anchor[i])
            return false;
        fixed[src_anchor[i]] = tgt_anchor[i];
    }
    auto tset = atom_set(tgt);
    all_maps(names_in(src, src_anchor), names_in(tgt, tgt_anchor), fixed, [&](const Assignment & m) {
        found = maps_atoms(src, tset, m);
        return !found;
    });
    return found;
}

inline bool hom_exists(const ConjunctiveQuery & a, const ConjunctiveQuery & b)
{
    return hom_exists(a.atoms(), a.head(), b.atoms(), b.head());
}

// Size of the core: the smallest number of atoms in the image of an endomorphism.
inline std::size_t core_size(const ConjunctiveQuery & q)
{
    std::size_t best = q.atoms().size();
    for (const auto & h : homs(q.atoms(), q.head(), q.atoms(), q.head())) {
        std::set<Atom> image;
        for (const auto & a : q.atoms()) {
            Atom img{a.relation, {}};
            for (const auto & t : a.args)
                img.args.push_back(h.at(t));
            image.insert(img);
        }
        best = std::min(best, image.size());
    }
    return best;
}

// Answers of q over a database by full enumeration.
inline std::set<cqa::Tuple> answers(const ConjunctiveQuery & q, const cqa::Database & db)
{
    std::set<cqa::Tuple> out;
    auto tset = atom_set(db.facts());
    auto dom = names_in(db.facts());
    all_maps(q.variables(), dom, {}, [&](const Assignment & m) {
        if (maps_atoms(q.atoms(), tset, m)) {
            cqa::Tuple t;
            for (const auto & v : q.head())
                t.push_back(m.at(v));
            out.insert(t);
        }
        return true;
    });
    return out;
}

// k-subsets of the atom list (by index), each as a sorted index vector.
inline std::vector<std::vector<std::size_t>> subsets_upto(std::size_t n, std::size_t k)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (!cur.empty())
            out.push_back(cur);
        if (cur.size() == k)
            return;
        for (std::size_t i = from; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

// Random CQ over binary relations E and F with `vars` variables and `atoms` atoms.
inline ConjunctiveQuery random_query(std::mt19937 & rng, int vars, int atoms, int head_size, bool two_relations = true)
{
    std::uniform_int_distribution<int> v(0, vars - 1);
    std::uniform_int_distribution<int> r(0, two_relations ? 1 : 0);
    std::vector<Atom> body;
    for (int i = 0; i < atoms; ++i)
        body.push_back({r(rng) ? "F" : "E", {"v" + std::to_string(v(rng)), "v" + std::to_string(v(rng))}});
    auto used = names_in(body);
    std::vector<std::string> head;
    for (int i = 0; i < head_size && !used.empty(); ++i)
        head.push_back(used[std::uniform_int_distribution<std::size_t>(0, used.size() - 1)(rng)]);
    return ConjunctiveQuery(head, body);
}

inline cqa::Database random_database(std::mt19937 & rng, int constants, int facts)
{
    std::uniform_int_distribution<int> c(0, constants - 1);
    std::uniform_int_distribution<int> r(0, 1);
    std::vector<Atom> out;
    for (int i = 0; i < facts; ++i)
        out.push_back({r(rng) ? "F" : "E", {"a" + std::to_string(c(rng)), "a" + std::to_string(c(rng))}});
    return cqa::Database(out);
}

} // namespace oracle

namespace oracle {

// Atom-at-a-time backtracking join: atoms are ordered so that each one
// shares a variable with an earlier atom when possible, then matched
// against the target facts of the same relation.
inline bool join_exists(const std::vector<Atom> & src, const std::vector<std::string> & src_anchor,
                        const std::vector<Atom> & tgt, const std::vector<std::string> & tgt_anchor)
{
    Assignment fixed;
    for (std::size_t i = 0; i < src_anchor.size(); ++i) {
        auto it = fixed.find(src_anchor[i]);
        if (it != fixed.end() && it->second != tgt_anchor[i])
            return false;
        fixed[src_anchor[i]] = tgt_anchor[i];
    }
    std::map<std::string, std::vector<const Atom *>> facts;
    for (const auto & f : tgt)
        facts[f.relation].push_back(&f);

    std::vector<const Atom *> order;
    std::vector<char> used(src.size(), 0);
    std::set<std::string> seen;
    for (const auto & [v, c] : fixed)
        seen.insert(v);
    while (order.size() < src.size()) {
        std::size_t pick = src.size();
        for (std::size_t i = 0; i < src.size() && pick == src.size(); ++i)
            if (!used[i] && std::any_of(src[i].args.begin(), src[i].args.end(),
                                        [&](const std::string & v) { return seen.count(v) > 0; }))
                pick = i;
        if (pick == src.size())
            pick = std::find(used.begin(), used.end(), 0) - used.begin();
        used[pick] = 1;
        order.push_back(&src[pick]);
        seen.insert(src[pick].args.begin(), src[pick].args.end());
    }

    std::function<bool(std::size_t, Assignment &)> extend = [&](std::size_t i, Assignment & m) {
        if (i == order.size())
            return true;
        const Atom & a = *order[i];
        for (const Atom * f : facts[a.relation]) {
            if (f->args.size() != a.args.size())
                continue;
            std::vector<std::string> added;
            bool ok = true;
            for (std::size_t j = 0; j < a.args.size() && ok; ++j) {
                auto it = m.find(a.args[j]);
                if (it == m.end()) {
                    m[a.args[j]] = f->args[j];
                    added.push_back(a.args[j]);
                }
                else
                    ok = it->second == f->args[j];
            }
            if (ok && extend(i + 1, m))
                return true;
            for (const auto & v : added)
                m.erase(v);
        }
        return false;
    };
    return extend(0, fixed);
}

} // namespace oracle
