#pragma once

#include "cqapprox/hom.hpp"
#include "cqapprox/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cqa {

/// body -> exists z̄ head. Head variables that are not in the body are the
/// existential ones.
struct Tgd
{
    std::vector<Atom> body;
    std::vector<Atom> head;

    std::vector<std::string> body_variables() const;
    std::vector<std::string> frontier() const;
    std::vector<std::string> existential() const;
    /// Some body atom mentions every body variable.
    bool guarded() const;
    std::string to_string() const;
};

/// body -> lhs = rhs, with both sides body variables.
struct Egd
{
    std::vector<Atom> body;
    std::string lhs;
    std::string rhs;

    std::string to_string() const;
};

struct DependencySet
{
    std::vector<Tgd> tgds;
    std::vector<Egd> egds;

    bool empty() const { return tgds.empty() && egds.empty(); }
    bool mixed() const { return !tgds.empty() && !egds.empty(); }
    bool all_guarded() const;
};

/// One dependency per statement, terminated by '.':
///   R(x,y), S(y,z) -> T(x,z), U(z,w).
///   R(x,y,z), R(x,y2,z2) -> z = z2.
DependencySet parse_dependencies(std::string_view text);
std::string serialize(const DependencySet & deps);

/// Every trigger of every dependency is satisfied in the instance. Query
/// variables are treated as elements.
bool satisfies(const std::vector<Atom> & instance, const DependencySet & deps);
bool satisfies(const Database & db, const DependencySet & deps);
bool satisfies(const ConjunctiveQuery & q, const DependencySet & deps);

struct ChaseResult
{
    ConjunctiveQuery query;
    /// Maps q's variables into the result (the identity for tgds).
    Hom hom_to_result;
    /// Fixpoint reached; false when the round cap stopped the chase.
    bool complete = true;
    int rounds = 0;
};

inline constexpr int default_chase_depth = 16;

/// Merges variables until no egd is violated. Free variables win as
/// representatives, then the smaller name. Throws std::invalid_argument
/// when tgds are present.
ChaseResult chase_egds(const ConjunctiveQuery & q, const DependencySet & deps);

/// Breadth-first restricted chase: each round fires every trigger found at
/// its start that is still unsatisfied when its turn comes. Nulls are named
/// _n1, _n2, ... Throws std::invalid_argument when egds are present.
ChaseResult chase_tgds(const ConjunctiveQuery & q, const DependencySet & deps, int max_depth = default_chase_depth);

/// Dispatches on the kind of dependencies; the empty set returns q itself.
ChaseResult chase(const ConjunctiveQuery & q, const DependencySet & deps, int max_depth = default_chase_depth);

enum class Verdict { False, True, Unknown };

const char * to_string(Verdict v);

/// q ⊆ q2 on all (possibly infinite) instances satisfying the dependencies.
/// Unknown only when a capped tgd chase has no homomorphism from q2 yet.
/// Mixed sets are rejected with std::invalid_argument.
Verdict contains_under(const ConjunctiveQuery & q, const ConjunctiveQuery & q2, const DependencySet & deps,
                       int max_depth = default_chase_depth);

struct ConstrainedEvaluation
{
    bool answer = false;
    /// False when the game ran on a capped chase prefix. A negative answer
    /// is still conclusive then; a positive one may be an overestimate.
    bool complete = true;
};

/// Evaluation of the GHW(k)-overapproximation of q under the dependencies.
/// Requires db to satisfy them (std::invalid_argument otherwise).
ConstrainedEvaluation eval_overapprox_under(const ConjunctiveQuery & q, const DependencySet & deps, const Database & db,
                                            const Tuple & tuple, int k, int max_depth = default_chase_depth);

} // namespace cqa
