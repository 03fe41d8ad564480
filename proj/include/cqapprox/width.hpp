#pragma once

#include "cqapprox/model.hpp"

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cqa {

/// A rooted tree whose bags hold existential variables only.
struct TreeDecomposition
{
    std::vector<int> parent;                ///< -1 for the root
    std::vector<std::set<std::string>> bags;
    int width = 0;

    std::size_t size() const { return bags.size(); }
    int add_node(int parent_node, std::set<std::string> bag);
};

/// Width-1 decomposition (a join tree) when the query is acyclic once
/// restricted to its existential variables.
std::optional<TreeDecomposition> ghw1_membership(const ConjunctiveQuery & q);

/// Fewest atoms of q whose variables cover `bag`, searching up to `limit`
/// atoms; nullopt when more are needed.
std::optional<int> cover_number(const ConjunctiveQuery & q, const std::set<std::string> & bag, int limit);

/// Checks tree shape, atom coverage, connectedness and cover width <= k.
bool validate_decomposition(const ConjunctiveQuery & q, const TreeDecomposition & td, int k);

/// Largest existential variable count compute_ghw accepts.
inline constexpr std::size_t ghw_variable_guard = 16;

/// Exact generalized hypertree width when it is at most kmax (at least 1).
/// Throws BudgetExceeded above ghw_variable_guard existential variables.
std::optional<int> compute_ghw(const ConjunctiveQuery & q, int kmax);

/// A decomposition of width compute_ghw(q), or nullopt when above kmax.
std::optional<TreeDecomposition> optimal_decomposition(const ConjunctiveQuery & q, int kmax);

/// Certificate text: one line per node, `node <id> parent <id|-> bag v1,v2,...`.
TreeDecomposition parse_certificate(std::string_view text);
std::string serialize(const TreeDecomposition & td);

} // namespace cqa
