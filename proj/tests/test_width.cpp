#include "doctest.h"
#include "oracles.hpp"

#include "cqapprox/width.hpp"

using namespace cqa;

namespace {

const char * triangle = "q() :- E(x,y), E(y,z), E(z,x).";

// Acyclicity by brute force: some tree on the (deduplicated) hyperedges
// satisfies the running-intersection property.
bool acyclic_oracle(const ConjunctiveQuery & q)
{
    auto free = q.free_variables();
    std::set<std::set<std::string>> uniq;
    for (const auto & a : q.atoms()) {
        std::set<std::string> e;
        for (const auto & v : a.args)
            if (!free.count(v))
                e.insert(v);
        if (!e.empty())
            uniq.insert(e);
    }
    std::vector<std::set<std::string>> edges(uniq.begin(), uniq.end());
    const int n = static_cast<int>(edges.size());
    if (n <= 1)
        return true;
    // parent[i] for i >= 1 ranges over all nodes; reject cyclic choices.
    std::vector<int> parent(n, 0);
    parent[0] = -1;
    for (;;) {
        bool tree = true;
        for (int i = 1; i < n && tree; ++i) {
            int steps = 0;
            for (int v = i; v != 0 && tree; v = parent[v])
                if (++steps > n || parent[v] == v)
                    tree = false;
        }
        if (tree) {
            TreeDecomposition td;
            td.parent = parent;
            td.bags = edges;
            bool ok = true;
            std::set<std::string> vars;
            for (const auto & e : edges)
                vars.insert(e.begin(), e.end());
            for (const auto & v : vars) {
                int tops = 0;
                for (int i = 0; i < n; ++i)
                    if (edges[i].count(v) && (parent[i] < 0 || !edges[parent[i]].count(v)))
                        ++tops;
                ok = ok && tops == 1;
            }
            if (ok)
                return true;
        }
        int i = 1;
        while (i < n && ++parent[i] == n)
            parent[i++] = 0;
        if (i == n)
            return false;
    }
}

} // namespace

TEST_CASE("acyclic queries")
{
    auto path = parse_query("q() :- E(x,y), E(y,z).");
    auto td = ghw1_membership(path);
    REQUIRE(td);
    CHECK(validate_decomposition(path, *td, 1));
    CHECK_FALSE(ghw1_membership(parse_query(triangle)));

    auto fig1_prime = parse_query("q() :- Pa(x,y1), Pa(y1,x), Pa(y2,z), Pa(z,y2), Pb(z,x), Pb(x,z).");
    auto td2 = ghw1_membership(fig1_prime);
    REQUIRE(td2);
    CHECK(validate_decomposition(fig1_prime, *td2, 1));
}

TEST_CASE("validation of hand-made decompositions")
{
    auto q = parse_query(triangle);
    TreeDecomposition one;
    one.add_node(-1, {"x", "y", "z"});
    CHECK_FALSE(validate_decomposition(q, one, 1));
    CHECK(validate_decomposition(q, one, 2));

    TreeDecomposition empty;
    CHECK(validate_decomposition(parse_query("q(x,y) :- E(x,y)."), empty, 1));

    TreeDecomposition split;
    int r = split.add_node(-1, {"x", "y"});
    int c = split.add_node(r, {"z"});
    split.add_node(c, {"x"});
    CHECK_FALSE(validate_decomposition(q, split, 3));

    TreeDecomposition two_roots;
    two_roots.add_node(-1, {"x", "y", "z"});
    two_roots.add_node(-1, {"x"});
    CHECK_FALSE(validate_decomposition(q, two_roots, 3));
}

TEST_CASE("exact width")
{
    CHECK(compute_ghw(parse_query(triangle), 5) == 2);
    CHECK(compute_ghw(parse_query("q() :- R(x,y,z)."), 5) == 1);
    CHECK(compute_ghw(parse_query(triangle), 1) == std::nullopt);
    // Four nodes, every pair joined: two disjoint edges cover all of them.
    auto tournament = parse_query("q() :- E(a,b), E(b,c), E(c,a), E(d,a), E(d,b), E(d,c).");
    CHECK(compute_ghw(tournament, 5) == 2);
    auto td = optimal_decomposition(tournament, 5);
    REQUIRE(td);
    CHECK(validate_decomposition(tournament, *td, 2));
}

TEST_CASE("certificate round trip")
{
    auto q = parse_query("q() :- E(a,b), E(b,c), E(c,d).");
    auto td = ghw1_membership(q);
    REQUIRE(td);
    auto back = parse_certificate(serialize(*td));
    CHECK(back.parent == td->parent);
    CHECK(back.bags == td->bags);
    CHECK_THROWS_AS(parse_certificate("node 0 parent 7 bag a\n"), ParseError);
    CHECK_THROWS_AS(parse_certificate("vertex 0\n"), ParseError);
}

TEST_CASE("width properties on random queries")
{
    std::mt19937 rng(11);
    for (int round = 0; round < 300; ++round) {
        auto q = oracle::random_query(rng, 6, 2 + round % 6, round % 2);
        CAPTURE(q.to_string());
        auto w = compute_ghw(q, 6);
        REQUIRE(w);
        bool acyclic = ghw1_membership(q).has_value();
        CHECK(acyclic == (*w == 1));
        CHECK(acyclic == acyclic_oracle(q));
        if (auto td = ghw1_membership(q))
            CHECK(validate_decomposition(q, *td, 1));
        auto td = optimal_decomposition(q, 6);
        REQUIRE(td);
        CHECK(validate_decomposition(q, *td, *w));
        if (*w > 1)
            CHECK_FALSE(validate_decomposition(q, *td, *w - 1));
        for (const auto & a : q.atoms()) {
            auto smaller = q.without_atom(a);
            auto w2 = compute_ghw(smaller, 6);
            REQUIRE(w2);
            CHECK(*w2 <= *w);
        }
    }
}
