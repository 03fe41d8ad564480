#pragma once
// Naive game solver: enumerates partial maps exhaustively and iterates the
// round-by-round definition until it stabilizes.

#include "oracles.hpp"

namespace oracle {

struct NaiveGame
{
    std::vector<std::set<std::string>> unions;
    std::vector<std::vector<Assignment>> valid;
    bool anchors_ok = true;

    NaiveGame(const std::vector<Atom> & src, const std::vector<std::string> & a, const std::vector<Atom> & tgt,
              const std::vector<std::string> & b, std::size_t k)
    {
        Assignment fixed;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (fixed.count(a[i]) && fixed[a[i]] != b[i])
                anchors_ok = false;
            fixed[a[i]] = b[i];
        }
        std::set<std::set<std::string>> seen;
        for (const auto & s : subsets_upto(src.size(), k)) {
            std::set<std::string> u;
            for (auto i : s)
                u.insert(src[i].args.begin(), src[i].args.end());
            seen.insert(u);
        }
        unions.assign(seen.begin(), seen.end());
        auto tset = atom_set(tgt);
        auto tdom = names_in(tgt, b);
        auto local = [&](const std::set<std::string> & dom) {
            std::vector<Atom> out;
            for (const auto & at : src)
                if (std::all_of(at.args.begin(), at.args.end(), [&](const std::string & v) { return dom.count(v) > 0; }))
                    out.push_back(at);
            return out;
        };
        std::set<std::string> anchor_dom(a.begin(), a.end());
        if (anchors_ok) {
            auto inside = local(anchor_dom);
            anchors_ok = maps_atoms(inside, tset, fixed);
        }
        for (const auto & u : unions) {
            std::set<std::string> dom = u;
            dom.insert(a.begin(), a.end());
            auto inside = local(dom);
            std::vector<Assignment> list;
            all_maps({dom.begin(), dom.end()}, tdom, fixed, [&](const Assignment & m) {
                if (maps_atoms(inside, tset, m))
                    list.push_back(m);
                return true;
            });
            valid.push_back(list);
        }
    }

    static bool agree(const Assignment & h, const Assignment & g)
    {
        for (const auto & [v, t] : h) {
            auto it = g.find(v);
            if (it != g.end() && it->second != t)
                return false;
        }
        return true;
    }

    std::vector<std::vector<Assignment>> step(const std::vector<std::vector<Assignment>> & good) const
    {
        std::vector<std::vector<Assignment>> next;
        for (std::size_t u = 0; u < unions.size(); ++u) {
            std::vector<Assignment> keep;
            for (const auto & h : valid[u]) {
                bool ok = true;
                for (std::size_t v = 0; v < unions.size() && ok; ++v)
                    ok = std::any_of(good[v].begin(), good[v].end(), [&](const Assignment & g) { return agree(h, g); });
                if (ok)
                    keep.push_back(h);
            }
            next.push_back(keep);
        }
        return next;
    }

    static bool nonempty(const std::vector<std::vector<Assignment>> & good)
    {
        return std::all_of(good.begin(), good.end(), [](const auto & g) { return !g.empty(); });
    }

    bool bounded(int c) const
    {
        if (!anchors_ok)
            return false;
        if (c == 0)
            return true;
        auto good = valid;
        for (int r = 1; r < c; ++r)
            good = step(good);
        return nonempty(good);
    }

    bool unbounded() const
    {
        if (!anchors_ok)
            return false;
        auto good = valid;
        for (;;) {
            auto next = step(good);
            if (next == good)
                return nonempty(good);
            good = next;
        }
    }
};

} // namespace oracle
