#include "doctest.h"
#include "oracles.hpp"

#include "cqapprox/hom.hpp"

using namespace cqa;

TEST_CASE("triangle maps to an edge loop but not to a path")
{
    auto tri = parse_query("q() :- E(x,y), E(y,z), E(z,x).");
    auto loop = parse_query("q() :- E(a,a).");
    auto path = parse_query("q() :- E(a,b), E(b,c).");
    CHECK(find_hom(tri, loop));
    CHECK_FALSE(find_hom(tri, path));
    CHECK(contains(loop, tri));
    CHECK_FALSE(contains(tri, loop));
}

TEST_CASE("anchors are respected")
{
    auto q = parse_query("q(x,y) :- E(x,y).");
    auto db = parse_database("E(a,b).\nE(b,c).");
    CHECK(evaluates_to(q, db, {"a", "b"}));
    CHECK_FALSE(evaluates_to(q, db, {"a", "c"}));
    CHECK(evaluate(q, db) == std::set<Tuple>{{"a", "b"}, {"b", "c"}});
    CHECK_THROWS_AS(evaluates_to(q, db, {"a"}), ArityError);
}

TEST_CASE("core of a path with a loop")
{
    auto q = parse_query("q() :- E(x,y), E(y,z), E(w,w).");
    auto c = core(q);
    CHECK(c.atoms().size() == 1);
    CHECK(is_core(c));
    CHECK(equivalent(c, q));
}

TEST_CASE("isomorphism")
{
    auto a = parse_query("q(x) :- E(x,y), E(y,z).");
    auto b = parse_query("q(u) :- E(u,v), E(v,w).");
    auto c = parse_query("q(u) :- E(v,u), E(w,v).");
    CHECK(isomorphic(a, b));
    CHECK_FALSE(isomorphic(a, c));
}

TEST_CASE("random queries agree with brute force")
{
    std::mt19937 rng(7);
    for (int round = 0; round < 300; ++round) {
        int head = round % 3;
        auto q1 = oracle::random_query(rng, 4, 1 + round % 5, head);
        auto q2 = oracle::random_query(rng, 3, 1 + round % 4, head);
        CAPTURE(q1.to_string());
        CAPTURE(q2.to_string());
        CHECK(find_hom(q1, q2).has_value() == oracle::hom_exists(q1, q2));
        if (auto h = find_hom(q1, q2))
            CHECK(is_homomorphism(Structure::from_query(q1), q1.head(), Structure::from_query(q2), q2.head(), *h));

        auto c = core(q1);
        CHECK(c.atoms().size() == oracle::core_size(q1));
        CHECK(equivalent(c, q1));
        CHECK(endomorphisms(q1).size() == oracle::homs(q1.atoms(), q1.head(), q1.atoms(), q1.head()).size());

        auto db = oracle::random_database(rng, 4, 6);
        CHECK(evaluate(q1, db) == oracle::answers(q1, db));
    }
}
