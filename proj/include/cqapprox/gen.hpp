#pragma once

#include "cqapprox/model.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cqa {

/// The ternary family whose GHW(1)-overapproximations blow up: 2 + 4(n-1) atoms.
ConjunctiveQuery gen_qn(int n);

inline constexpr int qn_prime_guard = 16;

/// Its overapproximation, indexed by words over {1,2}: 2(2^n - 1) atoms.
/// Throws BudgetExceeded above qn_prime_guard.
ConjunctiveQuery gen_qn_prime(int n);

/// A complete orientation on nodes v1..vm; edges are 1-based (from, to).
struct Tournament
{
    int nodes = 0;
    std::set<std::pair<int, int>> edges;

    bool has(int from, int to) const { return edges.count({from, to}) > 0; }
    void add(int from, int to) { edges.insert({from, to}); }
    /// Exactly one orientation per pair and no loops.
    bool is_tournament() const;
    /// Boolean query E(vi,vj) per edge.
    ConjunctiveQuery to_query() const;
};

/// Hand-built base tournaments on k + 1 nodes, k = 2, 3, 4.
Tournament dagger_base(int k);

/// The inductive construction on k + 1 nodes, k >= 2.
Tournament gen_dagger(int k);

/// Condition (dagger): for every B with 2 <= |B| <= k - 1 and v outside B,
/// some v' outside B connects to B differently. Optionally reports a
/// violating pair.
bool verify_dagger(const Tournament & g, std::pair<std::set<int>, int> * violation = nullptr);

/// v1 -> vj for all i < j.
Tournament transitive_tournament(int nodes);

/// Graphviz renderings.
std::string to_dot(const Tournament & g);
std::string gaifman_dot(const ConjunctiveQuery & q);

/// Conjunction of Pa(x1,x2), ..., Pa(xn,xn+1), Pb(x1,x1), Pb(xn+1,xn+1).
ConjunctiveQuery gen_nonunique(int n);

struct CorpusEntry
{
    std::optional<ConjunctiveQuery> query;
    std::optional<Database> database;
    std::string description;
};

/// Named example instances.
const std::map<std::string, CorpusEntry> & corpus();
const ConjunctiveQuery & corpus_query(const std::string & name);
const Database & corpus_database(const std::string & name);

} // namespace cqa
