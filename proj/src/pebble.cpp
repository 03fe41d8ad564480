#include "cqapprox/pebble.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace cqa {

namespace {

struct RawUnion
{
    std::vector<int> elements;
    std::vector<int> witness; // fact ids
};

std::vector<RawUnion> raw_unions(const Structure & src, int k)
{
    if (k < 1)
        throw std::invalid_argument("k must be at least 1");
    const int m = static_cast<int>(src.facts().size());
    std::map<std::vector<int>, std::vector<int>> seen;
    std::vector<int> chosen;
    std::function<void(int, std::vector<int>)> grow = [&](int from, std::vector<int> elements) {
        for (int f = from; f < m; ++f) {
            std::vector<int> next = elements;
            for (int e : src.facts()[f].args)
                next.push_back(e);
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            chosen.push_back(f);
            auto it = seen.find(next);
            if (it == seen.end() || it->second.size() > chosen.size())
                seen[next] = chosen;
            if (static_cast<int>(chosen.size()) < k)
                grow(f + 1, next);
            chosen.pop_back();
        }
    };
    grow(0, {});
    std::vector<RawUnion> out;
    for (auto & [elements, witness] : seen)
        out.push_back({elements, witness});
    std::stable_sort(out.begin(), out.end(),
                     [](const RawUnion & a, const RawUnion & b) { return a.elements.size() < b.elements.size(); });
    return out;
}

KUnion named(const Structure & src, const RawUnion & u)
{
    KUnion out;
    out.vars = src.names_of(u.elements);
    for (int f : u.witness) {
        const auto & fact = src.facts()[f];
        out.witness.push_back({src.relations()[fact.relation], src.names_of(fact.args)});
    }
    return out;
}

// Everything the two solvers share: the k-unions, every valid partial
// homomorphism on each of them, and agreement signatures per union pair.
class Arena
{
public:
    Arena(const Structure & src, const Tuple & src_tuple, const Structure & tgt, const Tuple & tgt_tuple, int k,
          const GameOptions & options) :
        src_(src), tgt_(tgt)
    {
        if (src_tuple.size() != tgt_tuple.size())
            throw ArityError("anchor tuples have different lengths (" + std::to_string(src_tuple.size()) + " vs "
                             + std::to_string(tgt_tuple.size()) + ")");
        unions_ = raw_unions(src, k);
        auto a = src.elements_of(src_tuple);
        auto b = tgt.elements_of(tgt_tuple);
        anchor_image_.assign(src.element_count(), -1);
        anchors_ok_ = true;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (anchor_image_[a[i]] >= 0 && anchor_image_[a[i]] != b[i])
                anchors_ok_ = false;
            anchor_image_[a[i]] = b[i];
        }
        for (const auto & [name, targets] : options.allowed) {
            auto e = src.element(name);
            if (!e)
                continue;
            std::vector<int> ids;
            for (const auto & t : targets)
                if (auto id = tgt.element(t))
                    ids.push_back(*id);
            allowed_.emplace_back(*e, std::move(ids));
        }
        if (anchors_ok_)
            anchors_ok_ = anchor_map_is_partial_hom();
        if (!anchors_ok_)
            return;
        for (const auto & u : unions_)
            members_.push_back(enumerate(u.elements));
        build_signatures();
    }

    bool anchors_ok() const { return anchors_ok_; }
    std::size_t union_count() const { return unions_.size(); }

    // Greatest fixpoint by support counting.
    std::vector<std::vector<char>> fixpoint(bool reverse)
    {
        auto live = all_live();
        auto cnt = counts(live);
        std::vector<std::pair<int, int>> queue;
        auto kill = [&](int u, int i) {
            if (!live[u][i])
                return;
            live[u][i] = 0;
            queue.emplace_back(u, i);
        };
        const int n = static_cast<int>(unions_.size());
        for (int step = 0; step < n; ++step) {
            int u = reverse ? n - 1 - step : step;
            const int size = static_cast<int>(members_[u].size());
            for (int s = 0; s < size; ++s) {
                int i = reverse ? size - 1 - s : s;
                for (int v = 0; v < n; ++v)
                    if (v != u && cnt[v][u][sig_[u][v][i]] == 0) {
                        kill(u, i);
                        break;
                    }
            }
        }
        for (std::size_t head = 0; head < queue.size(); ++head) {
            auto [u, i] = queue[head];
            for (int v = 0; v < n; ++v) {
                if (v == u)
                    continue;
                int sid = sig_[u][v][i];
                if (--cnt[u][v][sid] == 0)
                    for (int j : by_sig_[v][u][sid])
                        kill(v, j);
            }
        }
        return live;
    }

    // Members that are good for `rounds` rounds.
    std::vector<std::vector<char>> sweeps(int rounds)
    {
        auto live = all_live();
        const int n = static_cast<int>(unions_.size());
        for (int r = 1; r < rounds; ++r) {
            auto cnt = counts(live);
            auto next = live;
            bool changed = false;
            for (int u = 0; u < n; ++u)
                for (std::size_t i = 0; i < members_[u].size(); ++i) {
                    if (!live[u][i])
                        continue;
                    for (int v = 0; v < n; ++v)
                        if (v != u && cnt[v][u][sig_[u][v][i]] == 0) {
                            next[u][i] = 0;
                            changed = true;
                            break;
                        }
                }
            live = std::move(next);
            if (!changed)
                break;
        }
        return live;
    }

    static bool all_nonempty(const std::vector<std::vector<char>> & live)
    {
        for (const auto & l : live)
            if (std::find(l.begin(), l.end(), 1) == l.end())
                return false;
        return true;
    }

    WinningFamily family(const std::vector<std::vector<char>> & live) const
    {
        WinningFamily f;
        for (std::size_t u = 0; u < unions_.size(); ++u) {
            WinningFamily::Entry e;
            e.on = named(src_, unions_[u]);
            for (std::size_t i = 0; i < members_[u].size(); ++i) {
                if (!live[u][i])
                    continue;
                Hom h;
                for (int a = 0; a < src_.element_count(); ++a)
                    if (anchor_image_[a] >= 0)
                        h[src_.name(a)] = tgt_.name(anchor_image_[a]);
                for (std::size_t p = 0; p < unions_[u].elements.size(); ++p)
                    h[src_.name(unions_[u].elements[p])] = tgt_.name(members_[u][i][p]);
                e.members.push_back(std::move(h));
            }
            f.entries.push_back(std::move(e));
        }
        return f;
    }

private:
    std::vector<int> scope_facts(const std::vector<char> & in_scope) const
    {
        std::vector<int> out;
        for (int f = 0; f < static_cast<int>(src_.facts().size()); ++f) {
            bool inside = true;
            for (int e : src_.facts()[f].args)
                inside = inside && in_scope[e];
            if (inside)
                out.push_back(f);
        }
        return out;
    }

    void configure(HomSearch & search, const std::vector<char> & in_scope) const
    {
        std::vector<int> elements;
        for (int e = 0; e < src_.element_count(); ++e)
            if (in_scope[e])
                elements.push_back(e);
        search.restrict_elements(elements);
        search.restrict_facts(scope_facts(in_scope));
        for (int e = 0; e < src_.element_count(); ++e)
            if (anchor_image_[e] >= 0)
                search.fix(e, anchor_image_[e]);
        for (const auto & [e, ids] : allowed_)
            if (in_scope[e])
                search.restrict_domain(e, ids);
    }

    bool anchor_map_is_partial_hom() const
    {
        std::vector<char> in_scope(src_.element_count(), 0);
        for (int e = 0; e < src_.element_count(); ++e)
            in_scope[e] = anchor_image_[e] >= 0;
        HomSearch search(src_, tgt_);
        configure(search, in_scope);
        return search.find().has_value();
    }

    std::vector<std::vector<int>> enumerate(const std::vector<int> & elements) const
    {
        std::vector<char> in_scope(src_.element_count(), 0);
        for (int e = 0; e < src_.element_count(); ++e)
            in_scope[e] = anchor_image_[e] >= 0;
        for (int e : elements)
            in_scope[e] = 1;
        HomSearch search(src_, tgt_);
        configure(search, in_scope);
        std::vector<std::vector<int>> out;
        search.for_each(elements, [&](const std::vector<int> & sol) {
            std::vector<int> image;
            for (int e : elements)
                image.push_back(sol[e]);
            out.push_back(std::move(image));
            return true;
        });
        std::sort(out.begin(), out.end());
        return out;
    }

    void build_signatures()
    {
        const int n = static_cast<int>(unions_.size());
        sig_.assign(n, std::vector<std::vector<int>>(n));
        by_sig_.assign(n, std::vector<std::vector<std::vector<int>>>(n));
        sig_count_.assign(n, std::vector<int>(n, 0));
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) {
                const auto & eu = unions_[u].elements;
                const auto & ev = unions_[v].elements;
                std::vector<int> pu, pv;
                for (std::size_t i = 0; i < eu.size(); ++i) {
                    auto it = std::lower_bound(ev.begin(), ev.end(), eu[i]);
                    if (it != ev.end() && *it == eu[i]) {
                        pu.push_back(static_cast<int>(i));
                        pv.push_back(static_cast<int>(it - ev.begin()));
                    }
                }
                std::map<std::vector<int>, int> ids;
                auto assign = [&](int a, int b, const std::vector<int> & positions) {
                    auto & sig = sig_[a][b];
                    for (const auto & m : members_[a]) {
                        std::vector<int> key;
                        for (int p : positions)
                            key.push_back(m[p]);
                        auto [it, inserted] = ids.emplace(std::move(key), static_cast<int>(ids.size()));
                        sig.push_back(it->second);
                    }
                };
                assign(u, v, pu);
                assign(v, u, pv);
                int total = static_cast<int>(ids.size());
                sig_count_[u][v] = sig_count_[v][u] = total;
                for (auto [a, b] : {std::pair{u, v}, std::pair{v, u}}) {
                    by_sig_[a][b].assign(total, {});
                    for (std::size_t i = 0; i < sig_[a][b].size(); ++i)
                        by_sig_[a][b][sig_[a][b][i]].push_back(static_cast<int>(i));
                }
            }
    }

    std::vector<std::vector<char>> all_live() const
    {
        std::vector<std::vector<char>> live;
        for (const auto & m : members_)
            live.emplace_back(m.size(), 1);
        return live;
    }

    // cnt[u][v][sid]: live members of u with signature sid towards v.
    std::vector<std::vector<std::vector<int>>> counts(const std::vector<std::vector<char>> & live) const
    {
        const int n = static_cast<int>(unions_.size());
        std::vector<std::vector<std::vector<int>>> cnt(n, std::vector<std::vector<int>>(n));
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v) {
                if (u == v)
                    continue;
                cnt[u][v].assign(sig_count_[u][v], 0);
                for (std::size_t i = 0; i < members_[u].size(); ++i)
                    if (live[u][i])
                        ++cnt[u][v][sig_[u][v][i]];
            }
        return cnt;
    }

    const Structure & src_;
    const Structure & tgt_;
    std::vector<RawUnion> unions_;
    std::vector<int> anchor_image_;
    std::vector<std::pair<int, std::vector<int>>> allowed_;
    bool anchors_ok_ = false;
    std::vector<std::vector<std::vector<int>>> members_;
    std::vector<std::vector<std::vector<int>>> sig_;
    std::vector<std::vector<std::vector<std::vector<int>>>> by_sig_;
    std::vector<std::vector<int>> sig_count_;
};

Structure target_of(const Database & db, const Tuple & tuple)
{
    return Structure::from_atoms(db.facts(), tuple);
}

} // namespace

std::vector<KUnion> k_unions(const Structure & src, int k)
{
    std::vector<KUnion> out;
    for (const auto & u : raw_unions(src, k))
        out.push_back(named(src, u));
    return out;
}

std::vector<KUnion> k_unions(const ConjunctiveQuery & q, int k)
{
    return k_unions(Structure::from_query(q), k);
}

GameResult wins_cover_game(const Structure & src, const Tuple & src_tuple, const Structure & tgt,
                           const Tuple & tgt_tuple, int k, const GameOptions & options)
{
    Arena arena(src, src_tuple, tgt, tgt_tuple, k, options);
    GameResult r;
    if (!arena.anchors_ok())
        return r;
    auto live = arena.fixpoint(options.reverse_order);
    r.wins = Arena::all_nonempty(live);
    if (r.wins && options.want_family)
        r.family = arena.family(live);
    return r;
}

bool wins_cover_game(const ConjunctiveQuery & q, const ConjunctiveQuery & q2, int k)
{
    GameOptions o;
    o.want_family = false;
    return wins_cover_game(Structure::from_query(q), q.head(), Structure::from_query(q2), q2.head(), k, o).wins;
}

bool wins_cover_game(const ConjunctiveQuery & q, const Database & db, const Tuple & tuple, int k)
{
    GameOptions o;
    o.want_family = false;
    return wins_cover_game(Structure::from_query(q), q.head(), target_of(db, tuple), tuple, k, o).wins;
}

bool wins_bounded(const Structure & src, const Tuple & src_tuple, const Structure & tgt, const Tuple & tgt_tuple,
                  int k, int c)
{
    if (c < 0)
        throw std::invalid_argument("round count must be non-negative");
    Arena arena(src, src_tuple, tgt, tgt_tuple, k, {});
    if (!arena.anchors_ok())
        return false;
    if (c == 0)
        return true;
    return Arena::all_nonempty(arena.sweeps(c));
}

bool wins_bounded(const ConjunctiveQuery & q, const ConjunctiveQuery & q2, int k, int c)
{
    return wins_bounded(Structure::from_query(q), q.head(), Structure::from_query(q2), q2.head(), k, c);
}

bool wins_bounded(const ConjunctiveQuery & q, const Database & db, const Tuple & tuple, int k, int c)
{
    return wins_bounded(Structure::from_query(q), q.head(), target_of(db, tuple), tuple, k, c);
}

bool constrained_wins_1(const ConjunctiveQuery & q, const std::set<std::string> & x, const ConjunctiveQuery & q2,
                        const std::set<std::string> & x2)
{
    if (!q.is_boolean() || !q2.is_boolean())
        throw std::invalid_argument("the constrained game is defined for Boolean queries");
    GameOptions o;
    o.want_family = false;
    for (const auto & v : x)
        o.allowed[v] = x2;
    return wins_cover_game(Structure::from_query(q), {}, Structure::from_query(q2), {}, 1, o).wins;
}

bool is_winning_family(const Structure & src, const Tuple & src_tuple, const Structure & tgt, const Tuple & tgt_tuple,
                       int k, const WinningFamily & family)
{
    auto unions = k_unions(src, k);
    if (unions.size() != family.entries.size())
        return false;
    for (std::size_t u = 0; u < unions.size(); ++u) {
        const auto & entry = family.entries[u];
        if (entry.on.vars != unions[u].vars || entry.members.empty())
            return false;
        std::set<std::string> domain(entry.on.vars.begin(), entry.on.vars.end());
        domain.insert(src_tuple.begin(), src_tuple.end());
        for (const auto & h : entry.members) {
            if (h.size() != domain.size())
                return false;
            for (const auto & v : domain)
                if (!h.count(v))
                    return false;
            for (std::size_t i = 0; i < src_tuple.size(); ++i)
                if (h.at(src_tuple[i]) != tgt_tuple[i])
                    return false;
            for (const auto & f : src.facts()) {
                Tuple args = src.names_of(f.args);
                if (!std::all_of(args.begin(), args.end(), [&](const std::string & a) { return domain.count(a) > 0; }))
                    continue;
                auto rel = tgt.relation(src.relations()[f.relation]);
                if (!rel)
                    return false;
                std::vector<int> image;
                for (const auto & a : args) {
                    auto t = tgt.element(h.at(a));
                    if (!t)
                        return false;
                    image.push_back(*t);
                }
                if (!tgt.has_fact(*rel, image))
                    return false;
            }
            for (const auto & other : family.entries) {
                bool agrees = false;
                for (const auto & g : other.members) {
                    bool same = true;
                    for (const auto & v : other.on.vars)
                        if (domain.count(v) && h.at(v) != g.at(v))
                            same = false;
                    if (same) {
                        agrees = true;
                        break;
                    }
                }
                if (!agrees)
                    return false;
            }
        }
    }
    return true;
}

// --- unrolling ----------------------------------------------------------

namespace {

std::size_t saturating_add(std::size_t a, std::size_t b)
{
    return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max() : a + b;
}

std::size_t saturating_mul(std::size_t a, std::size_t b)
{
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
        return std::numeric_limits<std::size_t>::max();
    return a * b;
}

// Source facts with every argument in the label or the head.
std::vector<int> local_facts(const Structure & src, const std::vector<char> & anchor, const std::vector<int> & label)
{
    std::vector<char> inside = anchor;
    for (int e : label)
        inside[e] = 1;
    std::vector<int> out;
    for (int f = 0; f < static_cast<int>(src.facts().size()); ++f)
        if (std::all_of(src.facts()[f].args.begin(), src.facts()[f].args.end(), [&](int e) { return inside[e] != 0; }))
            out.push_back(f);
    return out;
}

std::vector<char> anchor_mask(const Structure & src, const ConjunctiveQuery & q)
{
    std::vector<char> anchor(src.element_count(), 0);
    for (int e : src.elements_of(q.head()))
        anchor[e] = 1;
    return anchor;
}

} // namespace

std::size_t unroll_size(const ConjunctiveQuery & q, int k, int c)
{
    auto src = Structure::from_query(q);
    auto anchor = anchor_mask(src, q);
    auto unions = raw_unions(src, k);
    std::size_t per_level = 0;
    for (const auto & u : unions)
        per_level = saturating_add(per_level, local_facts(src, anchor, u.elements).size());
    std::size_t total = local_facts(src, anchor, {}).size();
    std::size_t nodes_above = 1;
    for (int depth = 1; depth <= c; ++depth) {
        total = saturating_add(total, saturating_mul(nodes_above, per_level));
        nodes_above = saturating_mul(nodes_above, unions.size());
    }
    return total;
}

Unrolling unroll_with_tree(const ConjunctiveQuery & q, int k, int c, std::size_t budget)
{
    if (c < 0)
        throw std::invalid_argument("round count must be non-negative");
    auto predicted = unroll_size(q, k, c);
    if (predicted > budget)
        throw BudgetExceeded("unrolling would produce " + std::to_string(predicted) + " atoms, budget is "
                             + std::to_string(budget));

    auto src = Structure::from_query(q);
    auto anchor = anchor_mask(src, q);
    auto unions = raw_unions(src, k);
    auto taken = q.variables();
    std::set<std::string> used(taken.begin(), taken.end());
    std::size_t counter = 0;
    auto fresh = [&](const std::string & base) {
        for (;;) {
            std::string name = base + "_u" + std::to_string(counter++);
            if (used.insert(name).second)
                return name;
        }
    };

    Unrolling out;
    std::vector<Atom> atoms;
    std::vector<std::vector<int>> labels;
    auto emit = [&](int node) {
        const auto & n = out.tree.nodes[node];
        for (int f : local_facts(src, anchor, labels[node])) {
            Atom a{src.relations()[src.facts()[f].relation], {}};
            for (int e : src.facts()[f].args)
                a.args.push_back(anchor[e] ? src.name(e) : n.names.at(src.name(e)));
            atoms.push_back(std::move(a));
        }
    };

    out.tree.nodes.push_back({});
    labels.push_back({});
    out.decomposition.add_node(-1, {});
    emit(0);
    std::vector<int> frontier{0};
    for (int depth = 1; depth <= c; ++depth) {
        std::vector<int> next;
        for (int parent : frontier)
            for (const auto & u : unions) {
                UnrollTree::Node node;
                node.parent = parent;
                node.depth = depth;
                node.label = src.names_of(u.elements);
                std::set<std::string> bag;
                const auto & above = out.tree.nodes[parent];
                for (int e : u.elements) {
                    const auto & name = src.name(e);
                    std::string image;
                    if (anchor[e])
                        image = name;
                    else if (auto it = above.names.find(name); it != above.names.end())
                        image = it->second;
                    else
                        image = fresh(name);
                    node.names[name] = image;
                    if (!anchor[e])
                        bag.insert(image);
                }
                int id = static_cast<int>(out.tree.nodes.size());
                out.tree.nodes.push_back(std::move(node));
                labels.push_back(u.elements);
                out.decomposition.add_node(parent, std::move(bag));
                emit(id);
                next.push_back(id);
            }
        frontier = std::move(next);
    }
    out.decomposition.width = k;
    out.query = ConjunctiveQuery(q.head(), std::move(atoms), q.name());
    return out;
}

ConjunctiveQuery unroll(const ConjunctiveQuery & q, int k, int c, std::size_t budget)
{
    return unroll_with_tree(q, k, c, budget).query;
}

} // namespace cqa
