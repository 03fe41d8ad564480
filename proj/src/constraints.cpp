#include "cqapprox/constraints.hpp"

#include "cqapprox/pebble.hpp"
#include "cqapprox/structure.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace cqa {

namespace {

std::set<std::string> vars_of(const std::vector<Atom> & atoms)
{
    std::set<std::string> out;
    for (const auto & a : atoms)
        out.insert(a.args.begin(), a.args.end());
    return out;
}

std::string join_atoms(const std::vector<Atom> & atoms)
{
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        out += (i ? ", " : "") + atoms[i].to_string();
    return out;
}

// Calls visit with the image of every body variable, for every homomorphism
// of the body into the instance. Stops when visit returns false.
void for_each_trigger(const std::vector<Atom> & body, const Structure & inst,
                      const std::function<bool(const std::map<std::string, std::string> &)> & visit)
{
    Structure src = Structure::from_atoms(body);
    HomSearch search(src, inst);
    std::vector<int> all(src.element_count());
    for (int i = 0; i < src.element_count(); ++i)
        all[i] = i;
    search.for_each(all, [&](const std::vector<int> & img) {
        std::map<std::string, std::string> h;
        for (int i = 0; i < src.element_count(); ++i)
            h[src.name(i)] = inst.name(img[i]);
        return visit(h);
    });
}

bool head_satisfied(const Tgd & t, const std::map<std::string, std::string> & h, const Structure & inst)
{
    Tuple src, tgt;
    for (const auto & v : t.frontier()) {
        src.push_back(v);
        tgt.push_back(h.at(v));
    }
    return find_hom(Structure::from_atoms(t.head), src, inst, tgt).has_value();
}

// Finds an unsatisfied tgd trigger or a violated egd trigger.
bool violated(const std::vector<Atom> & instance, const DependencySet & deps)
{
    Structure inst = Structure::from_atoms(instance);
    bool bad = false;
    for (const auto & t : deps.tgds) {
        for_each_trigger(t.body, inst, [&](const auto & h) {
            bad = !head_satisfied(t, h, inst);
            return !bad;
        });
        if (bad)
            return true;
    }
    for (const auto & e : deps.egds) {
        for_each_trigger(e.body, inst, [&](const auto & h) {
            bad = h.at(e.lhs) != h.at(e.rhs);
            return !bad;
        });
        if (bad)
            return true;
    }
    return false;
}

std::vector<Atom> parse_atom_list(detail::Lexer & lex)
{
    std::vector<Atom> atoms;
    for (;;) {
        atoms.push_back(detail::parse_atom(lex, true));
        if (!lex.accept(detail::Tok::Comma))
            return atoms;
    }
}

} // namespace

std::vector<std::string> Tgd::body_variables() const
{
    auto s = vars_of(body);
    return {s.begin(), s.end()};
}

std::vector<std::string> Tgd::frontier() const
{
    auto b = vars_of(body);
    std::vector<std::string> out;
    for (const auto & v : vars_of(head))
        if (b.contains(v))
            out.push_back(v);
    return out;
}

std::vector<std::string> Tgd::existential() const
{
    auto b = vars_of(body);
    std::vector<std::string> out;
    for (const auto & v : vars_of(head))
        if (!b.contains(v))
            out.push_back(v);
    return out;
}

bool Tgd::guarded() const
{
    auto all = vars_of(body);
    return std::any_of(body.begin(), body.end(), [&](const Atom & a) {
        return std::set<std::string>(a.args.begin(), a.args.end()) == all;
    });
}

std::string Tgd::to_string() const
{
    return join_atoms(body) + " -> " + join_atoms(head) + ".";
}

std::string Egd::to_string() const
{
    return join_atoms(body) + " -> " + lhs + " = " + rhs + ".";
}

bool DependencySet::all_guarded() const
{
    return std::all_of(tgds.begin(), tgds.end(), [](const Tgd & t) { return t.guarded(); });
}

DependencySet parse_dependencies(std::string_view text)
{
    using detail::Tok;
    detail::Lexer lex(text);
    DependencySet out;
    while (lex.peek().kind != Tok::End) {
        auto start = lex.peek();
        auto body = parse_atom_list(lex);
        lex.expect(Tok::Arrow, "'->'");
        auto first = lex.expect(Tok::Ident, "head atom or variable");
        if (lex.peek().kind == Tok::Equals) {
            lex.next();
            auto rhs = lex.expect(Tok::Ident, "variable");
            auto vars = vars_of(body);
            for (const auto * side : {&first, &rhs})
                if (!vars.contains(side->text))
                    throw ParseError("equated variable '" + side->text + "' does not occur in the body", side->line,
                                     side->column);
            out.egds.push_back({std::move(body), first.text, rhs.text});
        }
        else {
            // Re-parse the first head atom from its already consumed name.
            if (!detail::is_relation_name(first.text))
                throw ParseError("invalid relation name '" + first.text + "'", first.line, first.column);
            Atom atom{first.text, {}};
            lex.expect(Tok::LParen, "'('");
            if (!lex.accept(Tok::RParen))
                for (;;) {
                    auto arg = lex.expect(Tok::Ident, "variable");
                    if (!detail::is_variable_name(arg.text))
                        throw ParseError("constant '" + arg.text + "' is not allowed in a dependency", arg.line,
                                         arg.column);
                    atom.args.push_back(arg.text);
                    if (lex.accept(Tok::RParen))
                        break;
                    lex.expect(Tok::Comma, "',' or ')'");
                }
            std::vector<Atom> head{atom};
            if (lex.accept(Tok::Comma)) {
                auto rest = parse_atom_list(lex);
                head.insert(head.end(), rest.begin(), rest.end());
            }
            std::vector<Atom> all = body;
            all.insert(all.end(), head.begin(), head.end());
            try {
                schema_of(all);
            }
            catch (const ArityError & e) {
                throw ParseError(e.what(), start.line, start.column);
            }
            out.tgds.push_back({std::move(body), std::move(head)});
        }
        lex.expect(Tok::Period, "'.'");
    }
    return out;
}

std::string serialize(const DependencySet & deps)
{
    std::string out;
    for (const auto & t : deps.tgds)
        out += t.to_string() + "\n";
    for (const auto & e : deps.egds)
        out += e.to_string() + "\n";
    return out;
}

bool satisfies(const std::vector<Atom> & instance, const DependencySet & deps)
{
    return !violated(instance, deps);
}

bool satisfies(const Database & db, const DependencySet & deps)
{
    return satisfies(db.facts(), deps);
}

bool satisfies(const ConjunctiveQuery & q, const DependencySet & deps)
{
    return satisfies(q.atoms(), deps);
}

ChaseResult chase_egds(const ConjunctiveQuery & q, const DependencySet & deps)
{
    if (!deps.tgds.empty())
        throw std::invalid_argument("chase_egds expects egds only");
    auto free = q.free_variables();
    Hom h;
    for (const auto & v : q.variables())
        h[v] = v;
    ConjunctiveQuery cur = q;
    int rounds = 0;
    for (;;) {
        Structure inst = Structure::from_atoms(cur.atoms(), cur.variables());
        std::optional<std::pair<std::string, std::string>> merge;
        for (const auto & e : deps.egds) {
            for_each_trigger(e.body, inst, [&](const auto & m) {
                if (m.at(e.lhs) != m.at(e.rhs))
                    merge = {m.at(e.lhs), m.at(e.rhs)};
                return !merge;
            });
            if (merge)
                break;
        }
        if (!merge)
            break;
        auto [a, b] = *merge;
        bool fa = free.contains(a), fb = free.contains(b);
        std::string keep = fa != fb ? (fa ? a : b) : std::min(a, b);
        std::string drop = keep == a ? b : a;
        for (auto & [v, img] : h)
            if (img == drop)
                img = keep;
        cur = cur.rename({{drop, keep}});
        ++rounds;
    }
    return {cur, h, true, rounds};
}

ChaseResult chase_tgds(const ConjunctiveQuery & q, const DependencySet & deps, int max_depth)
{
    if (!deps.egds.empty())
        throw std::invalid_argument("chase_tgds expects tgds only");
    std::vector<Atom> atoms = q.atoms();
    auto vars = q.variables();
    std::set<std::string> taken(vars.begin(), vars.end());
    int counter = 0;
    auto fresh = [&] {
        std::string name;
        do
            name = "_n" + std::to_string(++counter);
        while (taken.contains(name));
        taken.insert(name);
        return name;
    };

    Hom identity;
    for (const auto & v : vars)
        identity[v] = v;
    int rounds = 0;
    for (;;) {
        Structure start = Structure::from_atoms(atoms, vars);
        std::vector<std::pair<const Tgd *, std::map<std::string, std::string>>> triggers;
        for (const auto & t : deps.tgds)
            for_each_trigger(t.body, start, [&](const auto & m) {
                if (!head_satisfied(t, m, start))
                    triggers.push_back({&t, m});
                return true;
            });
        if (triggers.empty())
            return {q.with_atoms(atoms), identity, true, rounds};
        if (rounds == max_depth)
            return {q.with_atoms(atoms), identity, false, rounds};
        ++rounds;
        for (const auto & [t, m] : triggers) {
            // Restricted: skip triggers satisfied by atoms added earlier this round.
            if (head_satisfied(*t, m, Structure::from_atoms(atoms)))
                continue;
            auto ext = m;
            for (const auto & z : t->existential())
                ext[z] = fresh();
            for (const auto & a : t->head) {
                Atom img{a.relation, {}};
                for (const auto & v : a.args)
                    img.args.push_back(ext.at(v));
                if (std::find(atoms.begin(), atoms.end(), img) == atoms.end())
                    atoms.push_back(img);
            }
        }
    }
}

ChaseResult chase(const ConjunctiveQuery & q, const DependencySet & deps, int max_depth)
{
    if (deps.mixed())
        throw std::invalid_argument("dependency sets must contain only tgds or only egds");
    if (!deps.egds.empty())
        return chase_egds(q, deps);
    return chase_tgds(q, deps, max_depth);
}

const char * to_string(Verdict v)
{
    switch (v) {
    case Verdict::False: return "false";
    case Verdict::True: return "true";
    case Verdict::Unknown: return "unknown";
    }
    return "?";
}

Verdict contains_under(const ConjunctiveQuery & q, const ConjunctiveQuery & q2, const DependencySet & deps,
                       int max_depth)
{
    if (q.arity() != q2.arity())
        throw ArityError("containment needs equal head arity");
    auto c = chase(q, deps, max_depth);
    if (contains(c.query, q2))
        return Verdict::True;
    return c.complete ? Verdict::False : Verdict::Unknown;
}

ConstrainedEvaluation eval_overapprox_under(const ConjunctiveQuery & q, const DependencySet & deps, const Database & db,
                                            const Tuple & tuple, int k, int max_depth)
{
    if (deps.mixed())
        throw std::invalid_argument("dependency sets must contain only tgds or only egds");
    if (tuple.size() != q.arity())
        throw ArityError("answer tuple has length " + std::to_string(tuple.size()) + ", query arity is "
                         + std::to_string(q.arity()));
    if (!satisfies(db, deps))
        throw std::invalid_argument("the database violates the dependencies");
    if (deps.tgds.empty() && deps.egds.empty())
        return {wins_cover_game(q, db, tuple, k), true};
    if (deps.tgds.empty() || deps.all_guarded()) {
        // For egds the chase is the merged query; guarded tgds need no chase.
        const ConjunctiveQuery & src = deps.tgds.empty() ? chase_egds(q, deps).query : q;
        return {wins_cover_game(src, db, tuple, k), true};
    }
    auto c = chase_tgds(q, deps, max_depth);
    return {wins_cover_game(c.query, db, tuple, k), c.complete};
}

} // namespace cqa
