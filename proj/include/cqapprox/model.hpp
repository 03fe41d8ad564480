#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cqa {

/// Raised for malformed query, fact, dependency or certificate text.
class ParseError : public std::runtime_error
{
public:
    ParseError(const std::string & what, std::size_t line, std::size_t column);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Raised when an operation receives structurally incompatible inputs
/// (relation arity clash, anchor tuples of different length, ...).
class ArityError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a construction or search would exceed its size guard.
class BudgetExceeded : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class TermKind { Variable, Constant };

struct Term
{
    TermKind kind = TermKind::Variable;
    std::string name;

    auto operator<=>(const Term &) const = default;
};

using Tuple = std::vector<std::string>;

/// A relational atom. Arguments are variables inside a query and constants
/// inside a database; which one is determined by the owning container.
struct Atom
{
    std::string relation;
    std::vector<std::string> args;

    auto operator<=>(const Atom &) const = default;
    bool operator==(const Atom &) const = default;

    std::string to_string() const;
};

/// Relation name -> arity. Throws ArityError on the first clash.
std::map<std::string, std::size_t> schema_of(const std::vector<Atom> & atoms);

/// Sorts atoms canonically (relation, then args), removes duplicates and
/// checks that every relation symbol is used with a single arity.
std::vector<Atom> canonicalize(std::vector<Atom> atoms);

/// A conjunctive query q(x̄) :- A1, ..., Am.
///
/// The head may repeat variables, and a head variable may be absent from
/// the body (it is then only constrained through the head). Atoms are kept
/// in canonical order without duplicates, so equality of two queries is
/// syntactic equality of heads and bodies.
class ConjunctiveQuery
{
public:
    ConjunctiveQuery() = default;
    ConjunctiveQuery(std::vector<std::string> head, std::vector<Atom> atoms, std::string name = "q");

    const std::string & name() const { return name_; }
    const std::vector<std::string> & head() const { return head_; }
    const std::vector<Atom> & atoms() const { return atoms_; }

    bool is_boolean() const { return head_.empty(); }
    std::size_t arity() const { return head_.size(); }

    /// All variables, sorted; includes head variables absent from the body.
    std::vector<std::string> variables() const;
    std::set<std::string> free_variables() const;
    std::vector<std::string> existential_variables() const;
    std::map<std::string, std::size_t> schema() const { return schema_of(atoms_); }
    std::size_t max_arity() const;

    /// Same head and name, atoms replaced.
    ConjunctiveQuery with_atoms(std::vector<Atom> atoms) const;
    /// Copy without the given atom (no-op when absent).
    ConjunctiveQuery without_atom(const Atom & atom) const;
    /// Applies a variable substitution to head and body; unmapped variables stay.
    ConjunctiveQuery rename(const std::map<std::string, std::string> & substitution) const;

    std::string to_string() const;

    bool operator==(const ConjunctiveQuery & other) const
    {
        return head_ == other.head_ && atoms_ == other.atoms_;
    }

private:
    std::string name_ = "q";
    std::vector<std::string> head_;
    std::vector<Atom> atoms_;
};

/// A finite set of ground facts.
class Database
{
public:
    Database() = default;
    explicit Database(std::vector<Atom> facts);

    const std::vector<Atom> & facts() const { return facts_; }
    std::vector<std::string> constants() const;
    std::size_t size() const { return facts_.size(); }
    bool contains(const Atom & fact) const;

    std::string to_string() const;

private:
    std::vector<Atom> facts_;
};

/// The canonical database D_q together with the image of the head.
struct CanonicalDatabase
{
    Database database;
    Tuple tuple;
};

/// Variables become constants "c_<var>"; the renaming is a bijection.
CanonicalDatabase canonical_database(const ConjunctiveQuery & q);

/// Reads a database back as a Boolean-or-anchored query: constants become
/// variables of the same name.
ConjunctiveQuery query_of_database(const Database & db, const Tuple & tuple = {}, std::string name = "q");

/// Disjoint conjunction: existential variables of the second query are
/// renamed apart with suffix "_d<i>", the i-th head variables of both
/// queries are identified (the first query's names win).
ConjunctiveQuery disjoint_conjunction(const ConjunctiveQuery & q, const ConjunctiveQuery & q2);

/// Undirected graph over the variables of a query.
struct GaifmanGraph
{
    std::vector<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges; ///< stored with first < second

    bool adjacent(const std::string & a, const std::string & b) const;
};

GaifmanGraph gaifman(const ConjunctiveQuery & q);

/// Connected components of a Boolean query, in order of their smallest
/// variable. Each component holds exactly the atoms over its variables.
std::vector<ConjunctiveQuery> connected_components(const ConjunctiveQuery & q);

// --- text formats -------------------------------------------------------

/// Parses a single rule `name(v1,...,vn) :- A1, ..., Am.`. `#` starts a
/// comment. An empty body is written `name() :- .` or `name().`.
ConjunctiveQuery parse_query(std::string_view text);

/// Parses one fact per line `R(c1,...,ck).`.
Database parse_database(std::string_view text);

/// Comma separated constants; the empty string is the empty tuple.
Tuple parse_tuple(std::string_view text);

/// Serialization is canonical: parse_query(serialize(q)) == q.
std::string serialize(const ConjunctiveQuery & q);
std::string serialize(const Database & db);

} // namespace cqa
