#include "cqapprox/approx.hpp"

#include <algorithm>
#include <sstream>

namespace cqa {

namespace {

void check_arity(const ConjunctiveQuery & q, const ConjunctiveQuery & q2)
{
    if (q.arity() != q2.arity())
        throw ArityError("queries have different head arity (" + std::to_string(q.arity()) + " vs "
                         + std::to_string(q2.arity()) + ")");
}

GameResult play(const ConjunctiveQuery & from, const ConjunctiveQuery & to, int k, bool want_family)
{
    GameOptions o;
    o.want_family = want_family;
    return wins_cover_game(Structure::from_query(from), from.head(), Structure::from_query(to), to.head(), k, o);
}

bool wins(const ConjunctiveQuery & from, const ConjunctiveQuery & to, int k)
{
    return play(from, to, k, false).wins;
}

std::optional<TreeDecomposition> width_witness(const ConjunctiveQuery & q, int k,
                                               const std::optional<TreeDecomposition> & cert)
{
    auto c = core(q);
    if (cert) {
        if (validate_decomposition(q, *cert, k) || validate_decomposition(c, *cert, k))
            return cert;
    }
    if (auto td = ghw1_membership(c))
        return td;
    if (k == 1)
        return std::nullopt;
    try {
        return optimal_decomposition(c, k);
    }
    catch (const BudgetExceeded & e) {
        throw PreconditionUnknown(std::string("cannot verify width ") + std::to_string(k)
                                  + " of the candidate without a certificate: " + e.what());
    }
}

} // namespace

bool in_ghw(const ConjunctiveQuery & q, int k, const std::optional<TreeDecomposition> & cert)
{
    return width_witness(q, k, cert).has_value();
}

bool identify_overapprox(const ConjunctiveQuery & q, const ConjunctiveQuery & cand, int k,
                         const std::optional<TreeDecomposition> & cert)
{
    check_arity(q, cand);
    if (!in_ghw(cand, k, cert))
        return false;
    return wins(cand, q, k) && wins(q, cand, k);
}

std::optional<OverapproxCertificate> certify_overapprox(const ConjunctiveQuery & q, const ConjunctiveQuery & cand, int k,
                                                        const std::optional<TreeDecomposition> & cert)
{
    check_arity(q, cand);
    auto td = width_witness(cand, k, cert);
    if (!td)
        return std::nullopt;
    auto forward = play(cand, q, k, true);
    if (!forward.wins)
        return std::nullopt;
    auto backward = play(q, cand, k, true);
    if (!backward.wins)
        return std::nullopt;
    return OverapproxCertificate{cand, k, *td, *forward.family, *backward.family};
}

bool eval_overapprox(const ConjunctiveQuery & q, const Database & db, const Tuple & tuple, int k)
{
    return wins_cover_game(q, db, tuple, k);
}

ExistsResult exists_overapprox(const ConjunctiveQuery & q, int k, int cmax, std::size_t budget)
{
    if (cmax < 1)
        throw std::invalid_argument("cmax must be at least 1");
    ExistsResult r;
    std::ostringstream log;
    // A query of width <= k is its own overapproximation.
    try {
        if (in_ghw(q, k)) {
            r.query = core(q);
            r.diagnostics = "c=0: core(q) already has width <= " + std::to_string(k) + "\n";
            return r;
        }
    }
    catch (const PreconditionUnknown &) {
    }
    for (int c = 1; c <= cmax; ++c) {
        r.rounds = c;
        ConjunctiveQuery qc;
        try {
            qc = unroll(q, k, c, budget);
        }
        catch (const BudgetExceeded & e) {
            log << "c=" << c << ": " << e.what() << "\n";
            r.rounds = c - 1;
            break;
        }
        if (wins(q, qc, k)) {
            log << "c=" << c << ": q ->_" << k << " q_c holds (" << qc.atoms().size() << " atoms)\n";
            r.query = core(qc);
            r.diagnostics = log.str();
            return r;
        }
        log << "c=" << c << ": q ->_" << k << " q_c fails (" << qc.atoms().size() << " atoms)\n";
    }
    log << "inconclusive: no unrolling up to c=" << r.rounds
        << " is reached by the game; an overapproximation exists iff some finite c works, so larger c may still"
           " succeed\n";
    r.diagnostics = log.str();
    return r;
}

// --- hash queries and swaps ---------------------------------------------

std::string hash_name_u(const std::string & var)
{
    return var + "_hu";
}

std::string hash_name_v(const std::string & var)
{
    return var + "_hv";
}

HashQuery hash_query(const ConjunctiveQuery & q, const std::string & u, const std::string & v)
{
    if (u == v || !gaifman(q).adjacent(u, v))
        throw std::invalid_argument("variables " + u + " and " + v + " are not adjacent");
    std::vector<Atom> atoms;
    HashQuery out;
    auto mentions = [](const Atom & a, const std::string & x) {
        return std::find(a.args.begin(), a.args.end(), x) != a.args.end();
    };
    for (const auto & a : q.atoms()) {
        bool has_u = mentions(a, u), has_v = mentions(a, v);
        if (!has_v) {
            Atom b{a.relation, {}};
            for (const auto & t : a.args) {
                b.args.push_back(hash_name_u(t));
                out.onto_base[hash_name_u(t)] = t;
            }
            atoms.push_back(std::move(b));
        }
        if (!has_u) {
            Atom b{a.relation, {}};
            for (const auto & t : a.args) {
                b.args.push_back(hash_name_v(t));
                out.onto_base[hash_name_v(t)] = t;
            }
            atoms.push_back(std::move(b));
        }
        if (has_u && has_v) {
            Atom b{a.relation, {}};
            for (const auto & t : a.args) {
                if (t != u && t != v)
                    throw std::invalid_argument("bridging atom " + a.to_string() + " has more than the two variables");
                b.args.push_back(t == u ? hash_name_u(u) : hash_name_v(v));
            }
            atoms.push_back(std::move(b));
        }
    }
    out.u = hash_name_u(u);
    out.v = hash_name_v(v);
    out.onto_base[out.u] = u;
    out.onto_base[out.v] = v;
    out.query = ConjunctiveQuery({}, std::move(atoms), q.name());
    return out;
}

std::optional<Swap> swapping_endomorphism(const ConjunctiveQuery & q)
{
    if (!q.is_boolean())
        throw std::invalid_argument("swapping endomorphisms are defined for Boolean queries");
    if (connected_components(q).size() > 1)
        throw std::invalid_argument("query is not connected");
    if (!ghw1_membership(q))
        throw std::invalid_argument("query is not acyclic");
    if (!is_core(q))
        throw std::invalid_argument("query is not a core");
    auto g = gaifman(q);
    for (const auto & h : endomorphisms(q)) {
        bool identity = std::all_of(h.begin(), h.end(), [](const auto & p) { return p.first == p.second; });
        if (identity)
            continue;
        for (const auto & [a, b] : g.edges)
            if (h.at(a) == b && h.at(b) == a)
                return Swap{h, a, b};
    }
    return std::nullopt;
}

// --- greedy GHW(1) construction -----------------------------------------

namespace {

bool acyclic(const ConjunctiveQuery & q)
{
    return ghw1_membership(q).has_value();
}

std::optional<ConjunctiveQuery> step_one(const ConjunctiveQuery & start, int component, GreedyTrace * trace)
{
    ConjunctiveQuery cur = start;
    while (!acyclic(cur)) {
        bool removed = false;
        for (const auto & e : cur.atoms()) {
            auto smaller = cur.without_atom(e);
            if (!wins(cur, smaller, 1))
                continue;
            if (trace)
                trace->steps.push_back({component, 1, "", "", cur, smaller, e});
            cur = smaller;
            removed = true;
            break;
        }
        if (!removed)
            return std::nullopt;
    }
    return cur;
}

std::optional<ConjunctiveQuery> step_two(const ConjunctiveQuery & q, int component, GreedyTrace * trace)
{
    auto g = gaifman(q);
    for (const auto & [u, v] : g.edges) {
        auto hq = hash_query(q, u, v);
        if (!wins(q, hq.query, 1))
            continue;
        const std::set<std::string> x{hq.u, hq.v};
        ConjunctiveQuery cur = hq.query;
        bool stuck = false;
        while (!acyclic(cur)) {
            bool removed = false;
            for (const auto & e : cur.atoms()) {
                bool protect = std::count(e.args.begin(), e.args.end(), hq.u) && std::count(e.args.begin(), e.args.end(), hq.v);
                if (protect)
                    continue;
                auto smaller = cur.without_atom(e);
                if (!constrained_wins_1(cur, x, smaller, x))
                    continue;
                if (trace)
                    trace->steps.push_back({component, 2, u, v, cur, smaller, e});
                cur = smaller;
                removed = true;
                break;
            }
            if (!removed) {
                stuck = true;
                break;
            }
        }
        if (!stuck)
            return cur;
    }
    return std::nullopt;
}

} // namespace

std::optional<ConjunctiveQuery> greedy_ghw1_overapprox(const ConjunctiveQuery & q, GreedyTrace * trace)
{
    if (!q.is_boolean())
        throw std::invalid_argument("the greedy construction needs a Boolean query");
    if (q.max_arity() > 2)
        throw std::invalid_argument("the greedy construction needs relations of arity at most 2");

    auto comps = connected_components(q);
    std::vector<char> keep(comps.size(), 1);
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (std::size_t j = 0; j < comps.size(); ++j)
            if (i != j && keep[j] && wins(comps[i], comps[j], 1)) {
                keep[i] = 0;
                break;
            }
    std::vector<ConjunctiveQuery> family;
    for (std::size_t i = 0; i < comps.size(); ++i)
        if (keep[i])
            family.push_back(comps[i]);
    if (trace)
        trace->components = family;

    std::optional<ConjunctiveQuery> result;
    for (std::size_t i = 0; i < family.size(); ++i) {
        auto part = step_one(family[i], static_cast<int>(i), trace);
        if (!part)
            part = step_two(family[i], static_cast<int>(i), trace);
        if (!part)
            return std::nullopt;
        result = result ? disjoint_conjunction(*result, *part) : *part;
    }
    if (!result)
        return ConjunctiveQuery({}, {}, q.name());
    return core(*result);
}

// --- Delta approximations -----------------------------------------------

bool identify_delta(const ConjunctiveQuery & q, const ConjunctiveQuery & cand, int k,
                    const std::optional<TreeDecomposition> & cert)
{
    check_arity(q, cand);
    if (!in_ghw(cand, k, cert))
        return false;
    return wins(q, cand, k) && !contains(q, cand) && !contains(cand, q);
}

DeltaEvaluation eval_delta_filtered(const ConjunctiveQuery & q, const ConjunctiveQuery & q_inc, const Database & db,
                                    const Tuple & tuple, int k)
{
    check_arity(q, q_inc);
    if (!in_ghw(q_inc, k))
        throw std::invalid_argument("the filter query is not of width " + std::to_string(k));
    DeltaEvaluation r;
    r.game = wins_cover_game(q, db, tuple, k);
    r.filter = evaluates_to(q_inc, db, tuple);
    r.incomparable = !contains(q, q_inc) && !contains(q_inc, q);
    r.answer = r.game && r.filter;
    return r;
}

std::set<Tuple> symmetric_difference_eval(const ConjunctiveQuery & q, const ConjunctiveQuery & q2, const Database & db)
{
    check_arity(q, q2);
    auto a = evaluate(q, db);
    auto b = evaluate(q2, db);
    std::set<Tuple> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.begin()));
    return out;
}

} // namespace cqa
