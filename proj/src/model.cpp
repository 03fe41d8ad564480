#include "cqapprox/model.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace cqa {

ParseError::ParseError(const std::string & what, std::size_t line, std::size_t column) :
    std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
    line_(line),
    column_(column)
{
}

std::string Atom::to_string() const
{
    std::string out = relation + "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i)
            out += ",";
        out += args[i];
    }
    return out + ")";
}

std::map<std::string, std::size_t> schema_of(const std::vector<Atom> & atoms)
{
    std::map<std::string, std::size_t> schema;
    for (const auto & a : atoms) {
        auto [it, inserted] = schema.emplace(a.relation, a.args.size());
        if (!inserted && it->second != a.args.size())
            throw ArityError("relation " + a.relation + " used with arity " + std::to_string(it->second) + " and "
                             + std::to_string(a.args.size()));
    }
    return schema;
}

std::vector<Atom> canonicalize(std::vector<Atom> atoms)
{
    schema_of(atoms);
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    return atoms;
}

// --- ConjunctiveQuery ---------------------------------------------------

ConjunctiveQuery::ConjunctiveQuery(std::vector<std::string> head, std::vector<Atom> atoms, std::string name) :
    name_(std::move(name)),
    head_(std::move(head)),
    atoms_(canonicalize(std::move(atoms)))
{
}

std::vector<std::string> ConjunctiveQuery::variables() const
{
    std::set<std::string> vars(head_.begin(), head_.end());
    for (const auto & a : atoms_)
        vars.insert(a.args.begin(), a.args.end());
    return {vars.begin(), vars.end()};
}

std::set<std::string> ConjunctiveQuery::free_variables() const
{
    return {head_.begin(), head_.end()};
}

std::vector<std::string> ConjunctiveQuery::existential_variables() const
{
    auto free = free_variables();
    std::vector<std::string> out;
    for (auto & v : variables())
        if (!free.contains(v))
            out.push_back(v);
    return out;
}

std::size_t ConjunctiveQuery::max_arity() const
{
    std::size_t m = 0;
    for (const auto & a : atoms_)
        m = std::max(m, a.args.size());
    return m;
}

ConjunctiveQuery ConjunctiveQuery::with_atoms(std::vector<Atom> atoms) const
{
    return ConjunctiveQuery(head_, std::move(atoms), name_);
}

ConjunctiveQuery ConjunctiveQuery::without_atom(const Atom & atom) const
{
    std::vector<Atom> rest;
    rest.reserve(atoms_.size());
    for (const auto & a : atoms_)
        if (!(a == atom))
            rest.push_back(a);
    return with_atoms(std::move(rest));
}

ConjunctiveQuery ConjunctiveQuery::rename(const std::map<std::string, std::string> & substitution) const
{
    auto sub = [&](const std::string & v) {
        auto it = substitution.find(v);
        return it == substitution.end() ? v : it->second;
    };
    std::vector<std::string> head;
    for (auto & v : head_)
        head.push_back(sub(v));
    std::vector<Atom> atoms;
    for (auto a : atoms_) {
        for (auto & t : a.args)
            t = sub(t);
        atoms.push_back(std::move(a));
    }
    return ConjunctiveQuery(std::move(head), std::move(atoms), name_);
}

std::string ConjunctiveQuery::to_string() const
{
    return serialize(*this);
}

// --- Database -----------------------------------------------------------

Database::Database(std::vector<Atom> facts) : facts_(canonicalize(std::move(facts))) {}

std::vector<std::string> Database::constants() const
{
    std::set<std::string> cs;
    for (const auto & f : facts_)
        cs.insert(f.args.begin(), f.args.end());
    return {cs.begin(), cs.end()};
}

bool Database::contains(const Atom & fact) const
{
    return std::binary_search(facts_.begin(), facts_.end(), fact);
}

std::string Database::to_string() const
{
    return serialize(*this);
}

// --- derived structures -------------------------------------------------

CanonicalDatabase canonical_database(const ConjunctiveQuery & q)
{
    auto c = [](const std::string & v) { return "c_" + v; };
    std::vector<Atom> facts;
    for (auto a : q.atoms()) {
        for (auto & t : a.args)
            t = c(t);
        facts.push_back(std::move(a));
    }
    Tuple tuple;
    for (auto & v : q.head())
        tuple.push_back(c(v));
    return {Database(std::move(facts)), std::move(tuple)};
}

ConjunctiveQuery query_of_database(const Database & db, const Tuple & tuple, std::string name)
{
    return ConjunctiveQuery(tuple, db.facts(), std::move(name));
}

ConjunctiveQuery disjoint_conjunction(const ConjunctiveQuery & q, const ConjunctiveQuery & q2)
{
    if (q.arity() != q2.arity())
        throw ArityError("disjoint conjunction needs equal head arity (" + std::to_string(q.arity()) + " vs "
                         + std::to_string(q2.arity()) + ")");

    std::set<std::string> taken;
    for (auto & v : q.variables())
        taken.insert(v);
    for (auto & v : q2.variables())
        taken.insert(v);

    // Head positions: q2's i-th head variable becomes q's i-th head variable.
    // A q2 variable occurring at several head positions must be merged with
    // every corresponding q variable, which may also merge q variables.
    std::vector<std::string> nodes = q.variables();
    auto q2vars = q2.variables();
    std::map<std::string, std::size_t> id1, id2;
    for (auto & v : nodes)
        id1.emplace(v, id1.size());
    for (auto & v : q2vars)
        id2.emplace(v, nodes.size() + id2.size());
    std::vector<std::size_t> parent(nodes.size() + q2vars.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (b < a)
            std::swap(a, b);
        parent[b] = a; // smaller id (a q variable when present) represents
    };
    for (std::size_t i = 0; i < q.arity(); ++i)
        unite(id1.at(q.head()[i]), id2.at(q2.head()[i]));

    std::map<std::string, std::string> sub1, sub2;
    for (auto & v : nodes) {
        auto r = find(id1.at(v));
        sub1[v] = nodes[r]; // representative is always a q variable here
    }
    std::size_t fresh = 0;
    std::map<std::size_t, std::string> fresh_names;
    for (auto & v : q2vars) {
        auto r = find(id2.at(v));
        if (r < nodes.size()) {
            sub2[v] = nodes[r];
            continue;
        }
        auto it = fresh_names.find(r);
        if (it == fresh_names.end()) {
            std::string name;
            do
                name = q2vars[r - nodes.size()] + "_d" + std::to_string(++fresh);
            while (taken.contains(name));
            taken.insert(name);
            it = fresh_names.emplace(r, name).first;
        }
        sub2[v] = it->second;
    }
    auto left = q.rename(sub1);
    auto right = q2.rename(sub2);
    std::vector<Atom> atoms = left.atoms();
    atoms.insert(atoms.end(), right.atoms().begin(), right.atoms().end());
    return ConjunctiveQuery(left.head(), std::move(atoms), q.name());
}

bool GaifmanGraph::adjacent(const std::string & a, const std::string & b) const
{
    if (a == b)
        return false;
    return a < b ? edges.contains({a, b}) : edges.contains({b, a});
}

GaifmanGraph gaifman(const ConjunctiveQuery & q)
{
    GaifmanGraph g;
    g.nodes = q.variables();
    for (const auto & a : q.atoms())
        for (std::size_t i = 0; i < a.args.size(); ++i)
            for (std::size_t j = 0; j < a.args.size(); ++j)
                if (a.args[i] < a.args[j])
                    g.edges.emplace(a.args[i], a.args[j]);
    return g;
}

std::vector<ConjunctiveQuery> connected_components(const ConjunctiveQuery & q)
{
    if (!q.is_boolean())
        throw std::invalid_argument("connected components are defined for Boolean queries only");
    auto g = gaifman(q);
    std::map<std::string, std::string> parent;
    for (auto & v : g.nodes)
        parent[v] = v;
    std::function<std::string(const std::string &)> find = [&](const std::string & x) {
        std::string r = x;
        while (parent[r] != r)
            r = parent[r];
        return r;
    };
    for (auto & [a, b] : g.edges) {
        auto ra = find(a), rb = find(b);
        if (ra != rb)
            parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::map<std::string, std::vector<Atom>> groups;
    for (const auto & a : q.atoms())
        groups[find(a.args.empty() ? std::string() : a.args.front())].push_back(a);
    std::vector<ConjunctiveQuery> out;
    for (auto & [root, atoms] : groups)
        out.emplace_back(std::vector<std::string>{}, std::move(atoms), q.name());
    return out;
}

// --- parsing ------------------------------------------------------------

ConjunctiveQuery parse_query(std::string_view text)
{
    using detail::Tok;
    detail::Lexer lex(text);
    auto name = lex.expect(Tok::Ident, "query name");
    lex.expect(Tok::LParen, "'('");
    std::vector<std::string> head;
    std::vector<detail::Token> head_tokens;
    if (!lex.accept(Tok::RParen)) {
        for (;;) {
            auto v = lex.expect(Tok::Ident, "head variable");
            if (!detail::is_variable_name(v.text))
                throw ParseError("head term '" + v.text + "' is not a variable", v.line, v.column);
            head.push_back(v.text);
            head_tokens.push_back(v);
            if (lex.accept(Tok::RParen))
                break;
            lex.expect(Tok::Comma, "',' or ')'");
        }
    }
    std::vector<Atom> atoms;
    if (lex.accept(Tok::Implies)) {
        if (lex.peek().kind != Tok::Period) {
            for (;;) {
                atoms.push_back(detail::parse_atom(lex, true));
                if (!lex.accept(Tok::Comma))
                    break;
            }
        }
    }
    lex.expect(Tok::Period, "'.'");
    if (lex.peek().kind != Tok::End)
        lex.fail("trailing input after query rule");

    std::set<std::string> body_vars;
    for (auto & a : atoms)
        body_vars.insert(a.args.begin(), a.args.end());
    for (std::size_t i = 0; i < head.size(); ++i) {
        if (body_vars.contains(head[i]))
            continue;
        if (std::count(head.begin(), head.end(), head[i]) < 2)
            throw ParseError("unsafe head variable '" + head[i] + "'", head_tokens[i].line, head_tokens[i].column);
    }
    return ConjunctiveQuery(std::move(head), std::move(atoms), name.text);
}

Database parse_database(std::string_view text)
{
    using detail::Tok;
    detail::Lexer lex(text);
    std::vector<Atom> facts;
    while (lex.peek().kind != Tok::End) {
        facts.push_back(detail::parse_atom(lex, false));
        lex.expect(Tok::Period, "'.'");
    }
    return Database(std::move(facts));
}

Tuple parse_tuple(std::string_view text)
{
    using detail::Tok;
    detail::Lexer lex(text);
    Tuple out;
    if (lex.peek().kind == Tok::End)
        return out;
    for (;;) {
        out.push_back(lex.expect(Tok::Ident, "constant").text);
        if (lex.peek().kind == Tok::End)
            break;
        lex.expect(Tok::Comma, "','");
    }
    return out;
}

std::string serialize(const ConjunctiveQuery & q)
{
    std::string out = q.name() + "(";
    for (std::size_t i = 0; i < q.head().size(); ++i) {
        if (i)
            out += ",";
        out += q.head()[i];
    }
    out += ") :-";
    for (std::size_t i = 0; i < q.atoms().size(); ++i)
        out += (i ? ", " : " ") + q.atoms()[i].to_string();
    return out + ".";
}

std::string serialize(const Database & db)
{
    std::string out;
    for (const auto & f : db.facts())
        out += f.to_string() + ".\n";
    return out;
}

} // namespace cqa
