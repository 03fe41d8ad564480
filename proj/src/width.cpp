#include "cqapprox/width.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

namespace cqa {

int TreeDecomposition::add_node(int parent_node, std::set<std::string> bag)
{
    parent.push_back(parent_node);
    bags.push_back(std::move(bag));
    return static_cast<int>(bags.size()) - 1;
}

namespace {

std::vector<std::set<std::string>> existential_edges(const ConjunctiveQuery & q)
{
    auto free = q.free_variables();
    std::vector<std::set<std::string>> edges;
    for (const auto & a : q.atoms()) {
        std::set<std::string> e;
        for (const auto & v : a.args)
            if (!free.count(v))
                e.insert(v);
        if (!e.empty())
            edges.push_back(std::move(e));
    }
    return edges;
}

// Links several roots under the first one; they share no variables, so
// connectedness is unaffected.
void join_roots(TreeDecomposition & td)
{
    int root = -1;
    for (std::size_t i = 0; i < td.size(); ++i)
        if (td.parent[i] < 0) {
            if (root < 0)
                root = static_cast<int>(i);
            else
                td.parent[i] = root;
        }
}

using Mask = std::uint32_t;

struct Hypergraph
{
    std::vector<std::string> vars;
    std::map<std::string, int> index;
    std::vector<Mask> edges;

    explicit Hypergraph(const ConjunctiveQuery & q)
    {
        vars = q.existential_variables();
        if (vars.size() > ghw_variable_guard)
            throw BudgetExceeded("width computation limited to " + std::to_string(ghw_variable_guard)
                                 + " existential variables, query has " + std::to_string(vars.size()));
        for (std::size_t i = 0; i < vars.size(); ++i)
            index[vars[i]] = static_cast<int>(i);
        for (const auto & e : existential_edges(q)) {
            Mask m = 0;
            for (const auto & v : e)
                m |= Mask(1) << index.at(v);
            edges.push_back(m);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }

    Mask mask_of(const std::set<std::string> & bag) const
    {
        Mask m = 0;
        for (const auto & v : bag) {
            auto it = index.find(v);
            if (it == index.end())
                return ~Mask(0);
            m |= Mask(1) << it->second;
        }
        return m;
    }
};

// Exact set cover by iterative deepening; `limit` bounds the depth.
std::optional<int> cover_mask(const std::vector<Mask> & edges, Mask bag, int limit)
{
    if (bag == 0)
        return 0;
    std::vector<Mask> useful;
    for (Mask e : edges)
        if (e & bag)
            useful.push_back(e & bag);
    std::sort(useful.begin(), useful.end());
    useful.erase(std::unique(useful.begin(), useful.end()), useful.end());
    std::vector<Mask> maximal;
    for (Mask e : useful) {
        bool dominated = false;
        for (Mask f : useful)
            if (f != e && (e & f) == e)
                dominated = true;
        if (!dominated)
            maximal.push_back(e);
    }
    Mask reach = 0;
    for (Mask e : maximal)
        reach |= e;
    if ((reach & bag) != bag)
        return std::nullopt;

    std::function<bool(Mask, int)> search = [&](Mask left, int budget) -> bool {
        if (left == 0)
            return true;
        if (budget == 0)
            return false;
        int low = __builtin_ctz(left);
        for (Mask e : maximal)
            if (e & (Mask(1) << low))
                if (search(left & ~e, budget - 1))
                    return true;
        return false;
    };
    for (int d = 1; d <= limit; ++d)
        if (search(bag, d))
            return d;
    return std::nullopt;
}

struct EliminationResult
{
    int width;
    std::vector<int> order;
};

std::optional<EliminationResult> best_elimination(const Hypergraph & h, int kmax)
{
    const int n = static_cast<int>(h.vars.size());
    if (n == 0)
        return EliminationResult{1, {}};
    std::vector<Mask> adj(n, 0);
    for (Mask e : h.edges)
        for (int v = 0; v < n; ++v)
            if (e & (Mask(1) << v))
                adj[v] |= e & ~(Mask(1) << v);

    std::unordered_map<Mask, int> cover_cache;
    auto cost = [&](Mask bag) {
        auto it = cover_cache.find(bag);
        if (it != cover_cache.end())
            return it->second;
        auto c = cover_mask(h.edges, bag, kmax);
        int value = c ? *c : kmax + 1;
        cover_cache.emplace(bag, value);
        return value;
    };
    // Neighbours of v outside `eliminated`, reached through eliminated vertices.
    auto later = [&](Mask eliminated, int v) {
        Mask seen = Mask(1) << v, frontier = Mask(1) << v, out = 0;
        while (frontier) {
            int u = __builtin_ctz(frontier);
            frontier &= frontier - 1;
            Mask nb = adj[u] & ~seen;
            seen |= nb;
            out |= nb & ~eliminated;
            frontier |= nb & eliminated;
        }
        return out;
    };

    const Mask full = n == 32 ? ~Mask(0) : (Mask(1) << n) - 1;
    const int inf = kmax + 1;
    std::vector<int> best(std::size_t(full) + 1, inf);
    std::vector<signed char> choice(std::size_t(full) + 1, -1);
    best[0] = 0;
    for (Mask s = 1; s <= full; ++s) {
        for (int v = 0; v < n; ++v) {
            if (!(s & (Mask(1) << v)))
                continue;
            Mask rest = s & ~(Mask(1) << v);
            if (best[rest] > kmax)
                continue;
            int w = std::max(best[rest], cost((Mask(1) << v) | later(rest, v)));
            if (w < best[s]) {
                best[s] = w;
                choice[s] = static_cast<signed char>(v);
            }
        }
        if (s == full)
            break;
    }
    if (best[full] > kmax)
        return std::nullopt;
    EliminationResult r{std::max(1, best[full]), {}};
    for (Mask s = full; s; s &= ~(Mask(1) << choice[s]))
        r.order.push_back(choice[s]);
    std::reverse(r.order.begin(), r.order.end());
    return r;
}

} // namespace

std::optional<TreeDecomposition> ghw1_membership(const ConjunctiveQuery & q)
{
    auto original = existential_edges(q);
    auto edges = original;
    const std::size_t m = edges.size();
    std::vector<char> alive(m, 1);
    std::vector<int> parent(m, -1);
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<std::string, int> occurrences;
        for (std::size_t i = 0; i < m; ++i)
            if (alive[i])
                for (const auto & v : edges[i])
                    ++occurrences[v];
        for (std::size_t i = 0; i < m; ++i) {
            if (!alive[i])
                continue;
            for (auto it = edges[i].begin(); it != edges[i].end();)
                if (occurrences[*it] == 1) {
                    it = edges[i].erase(it);
                    changed = true;
                }
                else
                    ++it;
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (!alive[i])
                continue;
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i || !alive[j])
                    continue;
                if (std::includes(edges[j].begin(), edges[j].end(), edges[i].begin(), edges[i].end())) {
                    alive[i] = 0;
                    parent[i] = static_cast<int>(j);
                    changed = true;
                    break;
                }
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        if (alive[i] && !edges[i].empty())
            return std::nullopt;

    TreeDecomposition td;
    td.width = 1;
    td.parent = parent;
    td.bags = original;
    join_roots(td);
    return td;
}

std::optional<int> cover_number(const ConjunctiveQuery & q, const std::set<std::string> & bag, int limit)
{
    std::vector<std::set<std::string>> sets;
    for (const auto & a : q.atoms())
        sets.emplace_back(a.args.begin(), a.args.end());
    std::vector<std::string> items(bag.begin(), bag.end());
    if (items.empty())
        return 0;
    std::vector<std::vector<std::size_t>> covering(items.size());
    for (std::size_t s = 0; s < sets.size(); ++s)
        for (std::size_t i = 0; i < items.size(); ++i)
            if (sets[s].count(items[i]))
                covering[i].push_back(s);
    std::vector<int> covered(items.size(), 0);
    std::function<bool(int)> search = [&](int budget) -> bool {
        std::size_t first = items.size();
        for (std::size_t i = 0; i < items.size(); ++i)
            if (!covered[i]) {
                first = i;
                break;
            }
        if (first == items.size())
            return true;
        if (budget == 0)
            return false;
        for (std::size_t s : covering[first]) {
            for (std::size_t i = 0; i < items.size(); ++i)
                if (sets[s].count(items[i]))
                    ++covered[i];
            bool ok = search(budget - 1);
            for (std::size_t i = 0; i < items.size(); ++i)
                if (sets[s].count(items[i]))
                    --covered[i];
            if (ok)
                return true;
        }
        return false;
    };
    for (int d = 1; d <= limit; ++d)
        if (search(d))
            return d;
    return std::nullopt;
}

bool validate_decomposition(const ConjunctiveQuery & q, const TreeDecomposition & td, int k)
{
    const int n = static_cast<int>(td.size());
    if (static_cast<int>(td.parent.size()) != n)
        return false;
    auto existential = q.existential_variables();
    std::set<std::string> ex(existential.begin(), existential.end());

    if (n == 0)
        return existential_edges(q).empty();

    int roots = 0;
    for (int i = 0; i < n; ++i) {
        if (td.parent[i] < 0)
            ++roots;
        else if (td.parent[i] >= n)
            return false;
    }
    if (roots != 1)
        return false;
    // Every node must reach the root without revisiting a node.
    for (int i = 0; i < n; ++i) {
        int steps = 0;
        for (int v = i; td.parent[v] >= 0; v = td.parent[v])
            if (++steps > n)
                return false;
    }

    for (const auto & bag : td.bags)
        for (const auto & v : bag)
            if (!ex.count(v))
                return false;

    for (const auto & e : existential_edges(q)) {
        bool inside = false;
        for (const auto & bag : td.bags)
            if (std::includes(bag.begin(), bag.end(), e.begin(), e.end())) {
                inside = true;
                break;
            }
        if (!inside)
            return false;
    }

    // The nodes holding v form a subtree iff exactly one of them has a
    // parent outside the set.
    for (const auto & v : ex) {
        int tops = 0, holders = 0;
        for (int i = 0; i < n; ++i) {
            if (!td.bags[i].count(v))
                continue;
            ++holders;
            if (td.parent[i] < 0 || !td.bags[td.parent[i]].count(v))
                ++tops;
        }
        if (holders > 0 && tops != 1)
            return false;
    }

    for (const auto & bag : td.bags)
        if (!cover_number(q, bag, k))
            return false;
    return true;
}

std::optional<int> compute_ghw(const ConjunctiveQuery & q, int kmax)
{
    Hypergraph h(q);
    auto r = best_elimination(h, kmax);
    if (!r || r->width > kmax)
        return std::nullopt;
    return r->width;
}

std::optional<TreeDecomposition> optimal_decomposition(const ConjunctiveQuery & q, int kmax)
{
    Hypergraph h(q);
    auto r = best_elimination(h, kmax);
    if (!r || r->width > kmax)
        return std::nullopt;
    const int n = static_cast<int>(h.vars.size());
    TreeDecomposition td;
    td.width = r->width;
    if (n == 0)
        return td;

    std::vector<Mask> adj(n, 0);
    for (Mask e : h.edges)
        for (int v = 0; v < n; ++v)
            if (e & (Mask(1) << v))
                adj[v] |= e & ~(Mask(1) << v);
    std::vector<int> position(n);
    for (int i = 0; i < n; ++i)
        position[r->order[i]] = i;
    // Fill-in graph along the order; bag i = v_i plus its later neighbours.
    std::vector<Mask> bag(n);
    for (int i = 0; i < n; ++i) {
        int v = r->order[i];
        Mask nb = adj[v];
        Mask higher = 0;
        for (int u = 0; u < n; ++u)
            if ((nb & (Mask(1) << u)) && position[u] > i)
                higher |= Mask(1) << u;
        bag[i] = higher | (Mask(1) << v);
        for (int a = 0; a < n; ++a)
            if (higher & (Mask(1) << a))
                adj[a] |= higher & ~(Mask(1) << a);
    }
    td.parent.assign(n, -1);
    td.bags.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int u = 0; u < n; ++u)
            if (bag[i] & (Mask(1) << u))
                td.bags[i].insert(h.vars[u]);
        int next = n;
        for (int u = 0; u < n; ++u)
            if ((bag[i] & (Mask(1) << u)) && position[u] > i)
                next = std::min(next, position[u]);
        if (next < n)
            td.parent[i] = next;
    }
    join_roots(td);
    return td;
}

TreeDecomposition parse_certificate(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, int> ids;
    std::vector<std::string> parents;
    std::vector<std::set<std::string>> bags;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string kw_node, id, kw_parent, parent, kw_bag, vars, extra;
        if (!(ls >> kw_node))
            continue;
        if (kw_node != "node" || !(ls >> id >> kw_parent >> parent >> kw_bag) || kw_parent != "parent" || kw_bag != "bag")
            throw ParseError("expected `node <id> parent <id|-> bag v1,...`", line_no, 1);
        ls >> vars;
        if (ls >> extra)
            throw ParseError("unexpected text after bag: " + extra, line_no, 1);
        if (ids.count(id))
            throw ParseError("duplicate node id " + id, line_no, 1);
        ids[id] = static_cast<int>(bags.size());
        parents.push_back(parent);
        std::set<std::string> bag;
        std::string v;
        std::istringstream vs(vars == "-" ? std::string() : vars);
        while (std::getline(vs, v, ','))
            if (!v.empty())
                bag.insert(v);
        bags.push_back(std::move(bag));
    }
    TreeDecomposition td;
    td.bags = std::move(bags);
    for (std::size_t i = 0; i < parents.size(); ++i) {
        if (parents[i] == "-")
            td.parent.push_back(-1);
        else {
            auto it = ids.find(parents[i]);
            if (it == ids.end())
                throw ParseError("unknown parent node " + parents[i], i + 1, 1);
            td.parent.push_back(it->second);
        }
    }
    return td;
}

std::string serialize(const TreeDecomposition & td)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < td.size(); ++i) {
        out << "node " << i << " parent ";
        if (td.parent[i] < 0)
            out << '-';
        else
            out << td.parent[i];
        out << " bag ";
        bool first = true;
        for (const auto & v : td.bags[i]) {
            out << (first ? "" : ",") << v;
            first = false;
        }
        if (td.bags[i].empty())
            out << '-';
        out << '\n';
    }
    return out.str();
}

} // namespace cqa
