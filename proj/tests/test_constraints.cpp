#include "doctest.h"
#include "constraint_oracle.hpp"

#include "cqapprox/approx.hpp"
#include "cqapprox/constraints.hpp"
#include "cqapprox/gen.hpp"

using namespace cqa;

namespace {

const char * closing = "E(x,y), E(y,z) -> E(z,x).";
const char * fd = "R(x,y,z), R(x,y2,z2) -> z = z2.";

} // namespace

TEST_CASE("dependency parsing")
{
    auto deps = parse_dependencies("# comment\nR(x,y), S(y,z) -> T(x,z), U(z,w).\nR(x,y,z), R(x,y2,z2) -> z = z2.\n");
    REQUIRE(deps.tgds.size() == 1);
    REQUIRE(deps.egds.size() == 1);
    CHECK(deps.tgds[0].frontier() == std::vector<std::string>{"x", "z"});
    CHECK(deps.tgds[0].existential() == std::vector<std::string>{"w"});
    CHECK_FALSE(deps.tgds[0].guarded());
    CHECK(deps.egds[0].lhs == "z");
    CHECK(deps.egds[0].rhs == "z2");
    CHECK(deps.mixed());
    CHECK(parse_dependencies("R(x,y) -> R(y,z).").tgds[0].guarded());

    auto again = parse_dependencies(serialize(deps));
    CHECK(serialize(again) == serialize(deps));

    CHECK_THROWS_AS(parse_dependencies("R(x,y) -> x = w."), ParseError);
    CHECK_THROWS_AS(parse_dependencies("R(x,y) -> R(x)."), ParseError);
    CHECK_THROWS_AS(parse_dependencies("R(x,y) -> S(a,B)."), ParseError);
    CHECK_THROWS_AS(parse_dependencies("R(x,y) S(y)."), ParseError);
    CHECK(parse_dependencies("").empty());
}

TEST_CASE("satisfaction")
{
    auto deps = parse_dependencies(closing);
    CHECK(satisfies(corpus_database("triangle_db"), deps));
    CHECK_FALSE(satisfies(parse_database("E(a1,a2). E(a2,a3). E(a3,a4). E(a4,a5). E(a5,a6). E(a6,a1)."), deps));
    CHECK(satisfies(corpus_database("edge_db"), DependencySet{}));
    CHECK(satisfies(parse_database("R(a,b,c). R(a,d,c)."), parse_dependencies(fd)));
    CHECK_FALSE(satisfies(parse_database("R(a,b,c). R(a,d,e)."), parse_dependencies(fd)));
}

TEST_CASE("satisfaction agrees with exhaustive trigger enumeration")
{
    std::mt19937 rng(71);
    int holds = 0;
    for (int round = 0; round < 100; ++round) {
        auto deps = oracle::random_dependencies(rng);
        auto db = oracle::random_database(rng, 3, 2 + round % 6);
        CAPTURE(serialize(deps));
        CAPTURE(serialize(db));
        bool expect = oracle::naive_satisfies(db, deps);
        holds += expect;
        CHECK(satisfies(db, deps) == expect);
    }
    CHECK(holds > 5);
    CHECK(holds < 95);
}

TEST_CASE("egd chase")
{
    auto deps = parse_dependencies(fd);
    auto q = parse_query("q() :- R(x,y,z), R(x,y,z2).");
    auto r = chase_egds(q, deps);
    CHECK(r.complete);
    CHECK(r.query == parse_query("q() :- R(x,y,z)."));
    CHECK(r.hom_to_result.at("z2") == "z");

    auto two = chase_egds(parse_query("q() :- R(x,y,z), R(x,y2,z2)."), deps);
    CHECK(two.query.atoms().size() == 2);
    CHECK(two.hom_to_result.at("z2") == "z");

    auto plain = parse_query("q() :- R(x,y,z), R(y,x,z2).");
    auto same = chase_egds(plain, deps);
    CHECK(same.query == plain);
    for (const auto & [v, img] : same.hom_to_result)
        CHECK(v == img);

    // Free variables are kept as representatives.
    auto free = chase_egds(parse_query("q(z2) :- R(x,y,z), R(x,y,z2)."), deps);
    CHECK(free.query.head() == std::vector<std::string>{"z2"});
    CHECK(free.hom_to_result.at("z") == "z2");

    auto both = chase_egds(parse_query("q(z,z2) :- R(x,y,z), R(x,y,z2)."), deps);
    CHECK(both.query.head() == std::vector<std::string>{"z", "z"});

    CHECK_THROWS_AS(chase_egds(q, parse_dependencies(closing)), std::invalid_argument);
}

TEST_CASE("egd chase invariants on random queries")
{
    std::mt19937 rng(73);
    for (int round = 0; round < 60; ++round) {
        auto q = oracle::random_query(rng, 4, 2 + round % 4, round % 2);
        auto deps = oracle::random_dependencies(rng);
        deps.tgds.clear();
        auto r = chase_egds(q, deps);
        CAPTURE(q.to_string());
        CHECK(satisfies(r.query, deps));
        std::set<Atom> image;
        for (const auto & a : q.atoms()) {
            Atom img{a.relation, {}};
            for (const auto & v : a.args)
                img.args.push_back(r.hom_to_result.at(v));
            image.insert(img);
        }
        CHECK(image == oracle::atom_set(r.query.atoms()));
        Tuple head;
        for (const auto & v : q.head())
            head.push_back(r.hom_to_result.at(v));
        CHECK(head == r.query.head());
    }
}

TEST_CASE("tgd chase")
{
    auto deps = parse_dependencies(closing);
    auto path = chase_tgds(corpus_query("path2"), deps);
    CHECK(path.complete);
    CHECK(isomorphic(path.query, corpus_query("triangle")));

    auto tri = chase_tgds(corpus_query("triangle"), deps);
    CHECK(tri.complete);
    CHECK(tri.rounds == 0);
    CHECK(tri.query == corpus_query("triangle"));

    auto grow = parse_dependencies("R(x,y) -> R(y,z).");
    auto capped = chase_tgds(parse_query("q() :- R(x,y)."), grow, 3);
    CHECK_FALSE(capped.complete);
    CHECK(capped.query.atoms().size() == 4);
    CHECK(capped.query.variables() == std::vector<std::string>{"_n1", "_n2", "_n3", "x", "y"});

    // Restricted: a head already witnessed is not fired.
    auto loop = chase_tgds(parse_query("q() :- R(x,y), R(y,y)."), grow, 3);
    CHECK(loop.complete);
    CHECK(loop.query.atoms().size() == 2);

    CHECK_THROWS_AS(chase_tgds(corpus_query("path2"), parse_dependencies(fd)), std::invalid_argument);
}

TEST_CASE("tgd chase invariants and universality")
{
    std::mt19937 rng(79);
    int universal_checks = 0;
    for (int round = 0; round < 80; ++round) {
        auto q = oracle::random_query(rng, 4, 1 + round % 4, 0);
        auto deps = oracle::random_dependencies(rng);
        deps.egds.clear();
        auto r = chase_tgds(q, deps, 4);
        CAPTURE(q.to_string());
        CAPTURE(serialize(deps));
        for (const auto & a : q.atoms())
            CHECK(std::find(r.query.atoms().begin(), r.query.atoms().end(), a) != r.query.atoms().end());
        if (!r.complete)
            continue;
        CHECK(satisfies(r.query, deps));
        for (int m = 0; m < 10; ++m) {
            auto model = oracle::random_database(rng, 3, 3 + m);
            if (!oracle::naive_satisfies(model, deps) || !oracle::hom_exists(q.atoms(), {}, model.facts(), {}))
                continue;
            ++universal_checks;
            CAPTURE(serialize(model));
            CAPTURE(r.query.to_string());
            CHECK(oracle::hom_exists(r.query.atoms(), {}, model.facts(), {}));
        }
    }
    CHECK(universal_checks > 10);
}

TEST_CASE("containment under dependencies")
{
    auto deps = parse_dependencies(closing);
    CHECK(contains_under(corpus_query("path2"), corpus_query("triangle"), deps) == Verdict::True);
    CHECK(contains_under(corpus_query("triangle"), corpus_query("path2"), deps) == Verdict::True);
    CHECK_FALSE(contains(corpus_query("path2"), corpus_query("triangle")));
    CHECK(contains_under(corpus_query("path2"), corpus_query("loop"), deps) == Verdict::False);

    auto fds = parse_dependencies(fd);
    auto two = parse_query("q() :- R(x,y,z), R(x,y,z2).");
    auto one = parse_query("q() :- R(x,y,z).");
    CHECK(contains_under(two, one, fds) == Verdict::True);
    CHECK(contains_under(one, two, fds) == Verdict::True);
    auto three = parse_query("q() :- R(x,y,z), R(x,y,z2), S(z,z2).");
    CHECK(contains_under(three, parse_query("q() :- S(u,u)."), fds) == Verdict::True);
    CHECK_FALSE(contains(three, parse_query("q() :- S(u,u).")));

    auto grow = parse_dependencies("R(x,y) -> R(y,z).");
    auto edge = parse_query("q() :- R(x,y).");
    CHECK(contains_under(edge, parse_query("q() :- R(a,b), R(b,c), R(c,d)."), grow, 3) == Verdict::True);
    CHECK(contains_under(edge, parse_query("q() :- R(a,a)."), grow, 3) == Verdict::Unknown);

    DependencySet mixed = deps;
    mixed.egds = fds.egds;
    CHECK_THROWS_AS(contains_under(two, one, mixed), std::invalid_argument);

    std::mt19937 rng(83);
    for (int round = 0; round < 100; ++round) {
        int arity = round % 2;
        auto q = oracle::random_query(rng, 4, 2 + round % 3, arity);
        auto q2 = oracle::random_query(rng, 4, 1 + round % 3, arity);
        if (q.arity() != q2.arity())
            continue;
        CHECK((contains_under(q, q2, DependencySet{}) == Verdict::True) == contains(q, q2));
    }
}

TEST_CASE("evaluation under dependencies")
{
    auto tri = corpus_query("triangle");
    for (const char * db : {"c2_db", "triangle_db", "edge_db"})
        CHECK(eval_overapprox_under(tri, {}, corpus_database(db), {}, 1).answer
              == eval_overapprox(tri, corpus_database(db), {}, 1));

    auto guarded = parse_dependencies("E(x,y) -> E(y,z).");
    auto r = eval_overapprox_under(tri, guarded, corpus_database("triangle_db"), {}, 1);
    CHECK(r.answer);
    CHECK(r.complete);
    CHECK_THROWS_AS(eval_overapprox_under(tri, guarded, corpus_database("edge_db"), {}, 1), std::invalid_argument);

    auto fds = parse_dependencies(fd);
    auto two = parse_query("q() :- R(x,y,z), R(x,y,z2).");
    CHECK(eval_overapprox_under(two, fds, parse_database("R(a,b,c)."), {}, 1).answer);
    auto anchored = parse_query("q(z,z2) :- R(x,y,z), R(x,y,z2).");
    CHECK(eval_overapprox_under(anchored, fds, parse_database("R(a,b,c)."), {"c", "c"}, 1).answer);
    CHECK_THROWS_AS(eval_overapprox_under(anchored, fds, parse_database("R(a,b,c)."), {"c"}, 1), ArityError);

    // Non-guarded tgds with a complete chase give an exact answer.
    auto closing_deps = parse_dependencies(closing);
    auto path = eval_overapprox_under(corpus_query("path2"), closing_deps, corpus_database("triangle_db"), {}, 1);
    CHECK(path.answer);
    CHECK(path.complete);
    CHECK_THROWS_AS(eval_overapprox_under(corpus_query("path2"), closing_deps, corpus_database("c2_db"), {}, 1),
                    std::invalid_argument);
    auto miss = eval_overapprox_under(corpus_query("path2"), closing_deps, corpus_database("edge_db"), {}, 1);
    CHECK_FALSE(miss.answer);
    CHECK(miss.complete);

    // A capped chase only yields a conclusive negative answer.
    auto grow = parse_dependencies("E(x,y), E(y,z) -> E(z,w).");
    REQUIRE_FALSE(grow.all_guarded());
    auto capped = eval_overapprox_under(corpus_query("path2"), grow, corpus_database("triangle_db"), {}, 1, 2);
    CHECK(capped.answer);
    CHECK_FALSE(capped.complete);
}

TEST_CASE("guarded tgds need no chase before the game")
{
    std::mt19937 rng(89);
    auto deps = parse_dependencies("E(x,y) -> F(y,z).");
    REQUIRE(deps.all_guarded());
    int compared = 0;
    for (int round = 0; round < 40; ++round) {
        auto db = oracle::random_database(rng, 4, 6);
        std::vector<Atom> facts = db.facts();
        for (const auto & f : db.facts())
            if (f.relation == "E")
                facts.push_back({"F", {f.args[1], f.args[1]}});
        Database closed(facts);
        REQUIRE(satisfies(closed, deps));
        auto q = oracle::random_query(rng, 4, 2 + round % 3, 0);
        bool direct = wins_cover_game(q, closed, {}, 1);
        CHECK(eval_overapprox_under(q, deps, closed, {}, 1).answer == direct);
        for (int depth = 0; depth <= 3; ++depth) {
            ++compared;
            CHECK(wins_cover_game(chase_tgds(q, deps, depth).query, closed, {}, 1) == direct);
        }
    }
    CHECK(compared == 160);
}
