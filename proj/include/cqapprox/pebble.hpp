#pragma once

#include "cqapprox/hom.hpp"
#include "cqapprox/structure.hpp"
#include "cqapprox/width.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cqa {

/// A set of source elements covered by at most k atoms.
struct KUnion
{
    std::vector<std::string> vars; ///< sorted
    std::vector<Atom> witness;     ///< a smallest covering set of atoms

    bool operator==(const KUnion &) const = default;
};

/// Distinct k-unions, ordered by size and then lexicographically.
std::vector<KUnion> k_unions(const Structure & src, int k);
std::vector<KUnion> k_unions(const ConjunctiveQuery & q, int k);

/// Duplicator's surviving strategy: for each k-union, the partial
/// homomorphisms on it (each also maps the anchors to their targets).
struct WinningFamily
{
    struct Entry
    {
        KUnion on;
        std::vector<Hom> members;
    };
    std::vector<Entry> entries;
};

struct GameResult
{
    bool wins = false;
    std::optional<WinningFamily> family; ///< present on a win
};

/// Optional knobs for the game solvers.
struct GameOptions
{
    /// Source element name -> allowed target element names.
    std::map<std::string, std::set<std::string>> allowed;
    /// Process initial deletions in reverse canonical order (the result is
    /// the same greatest fixpoint).
    bool reverse_order = false;
    bool want_family = true;
};

/// (src, src_tuple) ->_k (tgt, tgt_tuple) in the existential k-cover game.
/// Throws ArityError when the anchor tuples differ in length.
GameResult wins_cover_game(const Structure & src, const Tuple & src_tuple, const Structure & tgt,
                           const Tuple & tgt_tuple, int k, const GameOptions & options = {});
bool wins_cover_game(const ConjunctiveQuery & q, const ConjunctiveQuery & q2, int k);
bool wins_cover_game(const ConjunctiveQuery & q, const Database & db, const Tuple & tuple, int k);

/// Duplicator survives the first c rounds.
bool wins_bounded(const Structure & src, const Tuple & src_tuple, const Structure & tgt, const Tuple & tgt_tuple,
                  int k, int c);
bool wins_bounded(const ConjunctiveQuery & q, const ConjunctiveQuery & q2, int k, int c);
bool wins_bounded(const ConjunctiveQuery & q, const Database & db, const Tuple & tuple, int k, int c);

/// 1-cover game on Boolean queries in which elements of X must be answered
/// inside X2.
bool constrained_wins_1(const ConjunctiveQuery & q, const std::set<std::string> & x, const ConjunctiveQuery & q2,
                        const std::set<std::string> & x2);

/// Checks forth-closure, validity and non-emptiness of a family directly.
bool is_winning_family(const Structure & src, const Tuple & src_tuple, const Structure & tgt, const Tuple & tgt_tuple,
                       int k, const WinningFamily & family);

/// The tree behind q_c: node 0 is the root labelled with the empty set.
struct UnrollTree
{
    struct Node
    {
        int parent = -1;
        int depth = 0;
        std::vector<std::string> label;          ///< source elements (a k-union)
        std::map<std::string, std::string> names; ///< source element -> variable of q_c
    };
    std::vector<Node> nodes;
};

struct Unrolling
{
    ConjunctiveQuery query;
    UnrollTree tree;
    TreeDecomposition decomposition; ///< bags are the renamed labels minus head variables
};

inline constexpr std::size_t default_unroll_budget = 50000;

/// The width-k query q_c that maps to D exactly when Duplicator survives c
/// rounds from q to D. Throws BudgetExceeded when it would have more than
/// `budget` atoms.
Unrolling unroll_with_tree(const ConjunctiveQuery & q, int k, int c, std::size_t budget = default_unroll_budget);
ConjunctiveQuery unroll(const ConjunctiveQuery & q, int k, int c, std::size_t budget = default_unroll_budget);
/// Atom count of unroll(q, k, c) before deduplication; saturates at SIZE_MAX.
std::size_t unroll_size(const ConjunctiveQuery & q, int k, int c);

} // namespace cqa
