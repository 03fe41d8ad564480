#pragma once

#include "cqapprox/hom.hpp"
#include "cqapprox/pebble.hpp"
#include "cqapprox/width.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cqa {

/// Membership of a candidate in GHW(k) could not be established either way
/// (no usable certificate and the query is above the exact-search guard).
class PreconditionUnknown : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Whether the core of `q` has width <= k. A certificate, when given and
/// valid for q or its core, settles the question; otherwise k = 1 uses the
/// acyclicity test and k > 1 the exact search.
bool in_ghw(const ConjunctiveQuery & q, int k, const std::optional<TreeDecomposition> & cert = std::nullopt);

/// Evidence that `query` is the GHW(k)-overapproximation of some q.
struct OverapproxCertificate
{
    ConjunctiveQuery query;
    int k = 1;
    TreeDecomposition decomposition;  ///< of core(query)
    WinningFamily forward_family;     ///< query ->_k q
    WinningFamily backward_family;    ///< q ->_k query
};

/// cand is the GHW(k)-overapproximation of q (up to equivalence).
bool identify_overapprox(const ConjunctiveQuery & q, const ConjunctiveQuery & cand, int k,
                         const std::optional<TreeDecomposition> & cert = std::nullopt);
std::optional<OverapproxCertificate> certify_overapprox(const ConjunctiveQuery & q, const ConjunctiveQuery & cand, int k,
                                                        const std::optional<TreeDecomposition> & cert = std::nullopt);

/// a is an answer of the (possibly infinite) GHW(k)-overapproximation of q on D.
bool eval_overapprox(const ConjunctiveQuery & q, const Database & db, const Tuple & tuple, int k);

struct ExistsResult
{
    std::optional<ConjunctiveQuery> query; ///< absent when inconclusive
    int rounds = 0;                        ///< c of the successful unrolling, or the last c tried
    std::string diagnostics;
};

inline constexpr int default_cmax = 8;

/// Semi-decision: tries q_1, ..., q_cmax and returns core(q_c) for the first
/// c with q ->_k q_c. Never concludes non-existence.
ExistsResult exists_overapprox(const ConjunctiveQuery & q, int k, int cmax = default_cmax,
                               std::size_t budget = default_unroll_budget);

/// q_u # q_v together with the canonical homomorphism onto q.
struct HashQuery
{
    ConjunctiveQuery query;
    std::string u, v;   ///< the two variables of the bridge, renamed
    Hom onto_base;
};

std::string hash_name_u(const std::string & var);
std::string hash_name_v(const std::string & var);

/// Throws std::invalid_argument unless u and v are distinct and adjacent.
HashQuery hash_query(const ConjunctiveQuery & q, const std::string & u, const std::string & v);

struct Swap
{
    Hom endomorphism;
    std::string u, v;
};

/// The non-identity endomorphism of a connected Boolean acyclic core, which
/// must swap two adjacent variables. Throws std::invalid_argument when the
/// input is not such a core.
std::optional<Swap> swapping_endomorphism(const ConjunctiveQuery & q);

/// One accepted deletion of the greedy construction.
struct GreedyStep
{
    int component = 0;
    int phase = 1;                   ///< 1: plain subqueries, 2: subqueries of a hash query
    std::string u, v;                ///< pair used in phase 2
    ConjunctiveQuery before, after;
    Atom removed;
};

struct GreedyTrace
{
    std::vector<ConjunctiveQuery> components;  ///< the minimal family
    std::vector<GreedyStep> steps;
};

/// GHW(1)-overapproximation of a Boolean query over relations of arity <= 2,
/// or nullopt when none exists. Throws std::invalid_argument otherwise.
std::optional<ConjunctiveQuery> greedy_ghw1_overapprox(const ConjunctiveQuery & q, GreedyTrace * trace = nullptr);

/// cand is an incomparable GHW(k)-Delta-approximation of q.
bool identify_delta(const ConjunctiveQuery & q, const ConjunctiveQuery & cand, int k,
                    const std::optional<TreeDecomposition> & cert = std::nullopt);

struct DeltaEvaluation
{
    bool answer = false;
    bool game = false;          ///< q ->_k (D, a)
    bool filter = false;        ///< a in q_inc(D)
    bool incomparable = false;  ///< neither query contains the other
};

DeltaEvaluation eval_delta_filtered(const ConjunctiveQuery & q, const ConjunctiveQuery & q_inc, const Database & db,
                                    const Tuple & tuple, int k);

std::set<Tuple> symmetric_difference_eval(const ConjunctiveQuery & q, const ConjunctiveQuery & q2, const Database & db);

} // namespace cqa
