#include "cqapprox/approx.hpp"
#include "cqapprox/constraints.hpp"
#include "cqapprox/gen.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cqa;
using json = nlohmann::json;

namespace {

enum Exit { ExitTrue = 0, ExitFalse = 1, ExitInconclusive = 2, ExitError = 3 };

struct Options
{
    std::string query, candidate, db, tuple, deps, cert;
    int k = 1;
    int cmax = default_cmax;
    int rounds = -1;
    int max_depth = default_chase_depth;
    std::size_t budget = default_unroll_budget;
    bool json = false;
    std::string family;
    int n = 3;
};

struct Report
{
    std::string verdict = "error";
    json witness;
    std::string text; // human rendering of the witness
    json budget = json::object();
};

class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string & path, const char * what)
{
    if (path.empty())
        throw UsageError(std::string("missing --") + what);
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// `corpus:<name>` refers to a built-in example instead of a file.
ConjunctiveQuery load_query(const std::string & path, const char * what)
{
    if (path.rfind("corpus:", 0) == 0)
        return corpus_query(path.substr(7));
    return parse_query(read_file(path, what));
}

Database load_db(const std::string & path)
{
    if (path.rfind("corpus:", 0) == 0)
        return corpus_database(path.substr(7));
    return parse_database(read_file(path, "db"));
}

std::optional<TreeDecomposition> load_cert(const std::string & path)
{
    if (path.empty())
        return std::nullopt;
    return parse_certificate(read_file(path, "cert"));
}

std::string verdict_of(bool b)
{
    return b ? "true" : "false";
}

json to_json(const TreeDecomposition & td)
{
    json nodes = json::array();
    for (std::size_t i = 0; i < td.size(); ++i)
        nodes.push_back({{"id", i}, {"parent", td.parent[i]}, {"bag", td.bags[i]}});
    return {{"nodes", nodes}, {"width", td.width}, {"certificate", serialize(td)}};
}

json to_json(const WinningFamily & f)
{
    json out = json::array();
    for (const auto & e : f.entries)
        out.push_back({{"on", e.on.vars}, {"members", e.members}});
    return out;
}

std::string hom_text(const Hom & h)
{
    std::string out;
    for (const auto & [a, b] : h)
        out += (out.empty() ? "" : ", ") + a + " -> " + b;
    return out + "\n";
}

Tuple tuple_of(const Options & o)
{
    return parse_tuple(o.tuple);
}

Report cmd_eval(const Options & o)
{
    auto q = load_query(o.query, "query");
    auto db = load_db(o.db);
    Report r;
    if (!o.tuple.empty() || q.is_boolean()) {
        auto t = tuple_of(o);
        auto h = find_hom(q, db, t);
        r.verdict = verdict_of(h.has_value());
        if (h) {
            r.witness = {{"homomorphism", *h}};
            r.text = hom_text(*h);
        }
        return r;
    }
    auto answers = evaluate(q, db);
    r.verdict = verdict_of(!answers.empty());
    r.witness = {{"answers", answers}};
    for (const auto & a : answers) {
        std::string line;
        for (const auto & c : a)
            line += (line.empty() ? "" : ",") + c;
        r.text += line + "\n";
    }
    return r;
}

Report cmd_eval_over(const Options & o)
{
    auto q = load_query(o.query, "query");
    auto db = load_db(o.db);
    auto t = tuple_of(o);
    Report r;
    if (!o.deps.empty()) {
        auto deps = parse_dependencies(read_file(o.deps, "deps"));
        auto e = eval_overapprox_under(q, deps, db, t, o.k, o.max_depth);
        // On a capped chase prefix only a negative answer is conclusive.
        r.verdict = e.answer && !e.complete ? "inconclusive" : verdict_of(e.answer);
        r.budget["chase_capped"] = !e.complete;
        r.budget["max_depth"] = o.max_depth;
        return r;
    }
    auto g = wins_cover_game(Structure::from_query(q), q.head(), Structure::from_database(db), t, o.k,
                             GameOptions{{}, false, o.json});
    r.verdict = verdict_of(g.wins);
    if (g.family)
        r.witness = {{"family", to_json(*g.family)}};
    return r;
}

Report cmd_identify(const Options & o, bool delta)
{
    auto q = load_query(o.query, "query");
    auto cand = load_query(o.candidate, "candidate");
    auto cert = load_cert(o.cert);
    Report r;
    try {
        if (delta) {
            r.verdict = verdict_of(identify_delta(q, cand, o.k, cert));
            return r;
        }
        auto c = certify_overapprox(q, cand, o.k, cert);
        r.verdict = verdict_of(c.has_value());
        if (c) {
            r.witness = {{"decomposition", to_json(c->decomposition)}, {"core", serialize(core(cand))}};
            if (o.json) {
                r.witness["forward_family"] = to_json(c->forward_family);
                r.witness["backward_family"] = to_json(c->backward_family);
            }
            r.text = serialize(c->decomposition);
        }
    }
    catch (const PreconditionUnknown & e) {
        r.verdict = "inconclusive";
        r.budget["width_guard"] = true;
        r.text = std::string(e.what()) + "\n";
    }
    return r;
}

Report cmd_exists(const Options & o)
{
    auto q = load_query(o.query, "query");
    auto e = exists_overapprox(q, o.k, o.cmax, o.budget);
    Report r;
    r.verdict = e.query ? "true" : "inconclusive";
    r.budget = {{"cmax", o.cmax}, {"budget", o.budget}, {"rounds", e.rounds}};
    r.witness = {{"diagnostics", e.diagnostics}};
    if (e.query) {
        r.witness["query"] = serialize(*e.query);
        r.text = serialize(*e.query) + "\n";
    }
    else
        r.text = e.diagnostics + "\n";
    return r;
}

Report cmd_greedy(const Options & o)
{
    auto q = load_query(o.query, "query");
    GreedyTrace trace;
    auto out = greedy_ghw1_overapprox(q, &trace);
    Report r;
    r.verdict = verdict_of(out.has_value());
    json steps = json::array();
    for (const auto & s : trace.steps)
        steps.push_back({{"component", s.component}, {"phase", s.phase}, {"removed", s.removed.to_string()},
                         {"u", s.u}, {"v", s.v}});
    r.witness = {{"steps", steps}};
    if (out) {
        r.witness["query"] = serialize(*out);
        r.text = serialize(*out) + "\n";
    }
    return r;
}

Report cmd_core(const Options & o)
{
    auto c = core(load_query(o.query, "query"));
    Report r;
    r.verdict = "true";
    r.witness = {{"query", serialize(c)}};
    r.text = serialize(c) + "\n";
    return r;
}

Report cmd_game(const Options & o)
{
    auto q = load_query(o.query, "query");
    Structure src = Structure::from_query(q);
    Structure tgt;
    Tuple t;
    if (!o.candidate.empty()) {
        auto q2 = load_query(o.candidate, "candidate");
        tgt = Structure::from_query(q2);
        t = q2.head();
    }
    else {
        tgt = Structure::from_database(load_db(o.db));
        t = tuple_of(o);
    }
    Report r;
    if (o.rounds >= 0) {
        r.verdict = verdict_of(wins_bounded(src, q.head(), tgt, t, o.k, o.rounds));
        return r;
    }
    auto g = wins_cover_game(src, q.head(), tgt, t, o.k, GameOptions{{}, false, o.json});
    r.verdict = verdict_of(g.wins);
    if (g.family)
        r.witness = {{"family", to_json(*g.family)}};
    return r;
}

Report cmd_unroll(const Options & o)
{
    auto q = load_query(o.query, "query");
    Report r;
    r.budget = {{"budget", o.budget}, {"predicted_atoms", unroll_size(q, o.k, std::max(o.rounds, 0))}};
    try {
        auto u = unroll_with_tree(q, o.k, std::max(o.rounds, 0), o.budget);
        r.verdict = "true";
        r.witness = {{"query", serialize(u.query)}, {"decomposition", to_json(u.decomposition)}};
        r.text = serialize(u.query) + "\n" + serialize(u.decomposition);
    }
    catch (const BudgetExceeded & e) {
        r.verdict = "inconclusive";
        r.budget["exceeded"] = true;
        r.text = std::string(e.what()) + "\n";
    }
    return r;
}

Report cmd_chase(const Options & o)
{
    auto q = load_query(o.query, "query");
    auto deps = parse_dependencies(read_file(o.deps, "deps"));
    auto c = chase(q, deps, o.max_depth);
    Report r;
    r.verdict = c.complete ? "true" : "inconclusive";
    r.budget = {{"max_depth", o.max_depth}, {"capped", !c.complete}, {"rounds", c.rounds}};
    r.witness = {{"query", serialize(c.query)}, {"homomorphism", c.hom_to_result}};
    r.text = serialize(c.query) + "\n";
    return r;
}

Report cmd_satisfies(const Options & o)
{
    auto deps = parse_dependencies(read_file(o.deps, "deps"));
    Report r;
    if (!o.db.empty())
        r.verdict = verdict_of(satisfies(load_db(o.db), deps));
    else
        r.verdict = verdict_of(satisfies(load_query(o.query, "db or --query"), deps));
    return r;
}

Report cmd_contains(const Options & o, bool under)
{
    auto q = load_query(o.query, "query");
    auto q2 = load_query(o.candidate, "candidate");
    Report r;
    if (under) {
        auto deps = parse_dependencies(read_file(o.deps, "deps"));
        auto v = contains_under(q, q2, deps, o.max_depth);
        r.verdict = v == Verdict::Unknown ? "inconclusive" : to_string(v);
        return r;
    }
    // query ⊆ candidate is witnessed by a homomorphism from the candidate.
    auto h = find_hom(q2, q);
    r.verdict = verdict_of(h.has_value());
    if (h) {
        r.witness = {{"homomorphism", *h}};
        r.text = hom_text(*h);
    }
    return r;
}

Report cmd_eval_delta(const Options & o)
{
    auto q = load_query(o.query, "query");
    auto cand = load_query(o.candidate, "candidate");
    auto e = eval_delta_filtered(q, cand, load_db(o.db), tuple_of(o), o.k);
    Report r;
    r.verdict = verdict_of(e.answer);
    r.witness = {{"game", e.game}, {"filter", e.filter}, {"incomparable", e.incomparable}};
    return r;
}

Report cmd_gen(const Options & o)
{
    Report r;
    r.verdict = "true";
    auto emit_query = [&](const ConjunctiveQuery & q) {
        r.witness = {{"query", serialize(q)}};
        r.text = serialize(q) + "\n";
    };
    auto emit_graph = [&](const Tournament & g) {
        bool ok = verify_dagger(g);
        r.verdict = verdict_of(ok);
        r.witness = {{"query", serialize(g.to_query())}, {"dot", to_dot(g)}, {"dagger", ok}};
        r.text = to_dot(g);
    };
    if (o.family == "qn")
        emit_query(gen_qn(o.n));
    else if (o.family == "qn-prime")
        emit_query(gen_qn_prime(o.n));
    else if (o.family == "nonunique")
        emit_query(gen_nonunique(o.n));
    else if (o.family == "dagger")
        emit_graph(gen_dagger(o.n));
    else if (o.family == "transitive")
        emit_graph(transitive_tournament(o.n));
    else if (o.family == "corpus") {
        json names = json::array();
        for (const auto & [name, entry] : corpus()) {
            names.push_back(name);
            r.text += name + "  " + entry.description + "\n";
        }
        r.witness = {{"names", names}};
    }
    else if (corpus().count(o.family)) {
        const auto & entry = corpus().at(o.family);
        if (entry.query)
            emit_query(*entry.query);
        else {
            r.witness = {{"database", serialize(*entry.database)}};
            r.text = serialize(*entry.database);
        }
    }
    else
        throw UsageError("unknown family '" + o.family + "'");
    return r;
}

Report cmd_width(const Options & o)
{
    auto q = load_query(o.query, "query");
    Report r;
    if (auto cert = load_cert(o.cert)) {
        r.verdict = verdict_of(validate_decomposition(q, *cert, o.k));
        return r;
    }
    try {
        auto td = optimal_decomposition(q, o.k);
        r.verdict = verdict_of(td.has_value());
        if (td) {
            r.witness = {{"width", td->width}, {"decomposition", to_json(*td)}};
            r.text = serialize(*td);
        }
    }
    catch (const BudgetExceeded & e) {
        r.verdict = "inconclusive";
        r.budget["width_guard"] = true;
        r.text = std::string(e.what()) + "\n";
    }
    return r;
}

int exit_of(const std::string & verdict)
{
    if (verdict == "true")
        return ExitTrue;
    if (verdict == "false")
        return ExitFalse;
    if (verdict == "inconclusive")
        return ExitInconclusive;
    return ExitError;
}

} // namespace

int main(int argc, char ** argv)
{
    CLI::App app{"Approximations of conjunctive queries by bounded-width queries"};
    app.require_subcommand(1);
    Options o;

    struct Command
    {
        const char * name;
        const char * help;
        std::string flags; // letters: q c d t k m r D M C b f
        std::function<Report(const Options &)> run;
    };
    std::vector<Command> commands{
        {"eval", "evaluate a query on a database", "qdt", cmd_eval},
        {"eval-over", "evaluate the GHW(k)-overapproximation on a database", "qdtkDM", cmd_eval_over},
        {"identify-over", "check that the candidate is the GHW(k)-overapproximation", "qckC",
         [](const Options & x) { return cmd_identify(x, false); }},
        {"exists-over", "search for a finite overapproximation by unrolling", "qkmb", cmd_exists},
        {"greedy1", "GHW(1)-overapproximation of a binary Boolean query", "q", cmd_greedy},
        {"core", "compute the core", "q", cmd_core},
        {"game", "play the existential k-cover game", "qcdtkr", cmd_game},
        {"unroll", "build the unrolled query for c rounds", "qkrb", cmd_unroll},
        {"chase", "chase a query with tgds or egds", "qDM", cmd_chase},
        {"satisfies", "check dependencies on a database or query", "qdD", cmd_satisfies},
        {"contains", "check query ⊆ candidate", "qc", [](const Options & x) { return cmd_contains(x, false); }},
        {"contains-under", "check query ⊆ candidate under dependencies", "qcDM",
         [](const Options & x) { return cmd_contains(x, true); }},
        {"identify-delta", "check that the candidate is an incomparable Delta-approximation", "qckC",
         [](const Options & x) { return cmd_identify(x, true); }},
        {"eval-delta", "evaluate an incomparable Delta-approximation with its filter", "qcdtk", cmd_eval_delta},
        {"gen", "generate an instance family or corpus entry", "f", cmd_gen},
        {"width", "decompose with width <= k, or validate --cert", "qkC", cmd_width},
    };

    const Command * chosen = nullptr;
    for (const auto & c : commands) {
        auto * sub = app.add_subcommand(c.name, c.help);
        for (char f : c.flags) {
            switch (f) {
            case 'q': sub->add_option("--query", o.query, "query file or corpus:<name>"); break;
            case 'c': sub->add_option("--candidate", o.candidate, "candidate query file or corpus:<name>"); break;
            case 'd': sub->add_option("--db", o.db, "fact file or corpus:<name>"); break;
            case 't': sub->add_option("--tuple", o.tuple, "answer tuple c1,c2,..."); break;
            case 'k': sub->add_option("--k", o.k, "width bound")->check(CLI::PositiveNumber); break;
            case 'm': sub->add_option("--cmax", o.cmax, "largest unrolling depth")->check(CLI::PositiveNumber); break;
            case 'r': sub->add_option("--rounds", o.rounds, "number of game rounds")->check(CLI::NonNegativeNumber); break;
            case 'D': sub->add_option("--deps", o.deps, "dependency file"); break;
            case 'M': sub->add_option("--max-depth", o.max_depth, "chase round cap")->check(CLI::NonNegativeNumber); break;
            case 'C': sub->add_option("--cert", o.cert, "decomposition certificate"); break;
            case 'b': sub->add_option("--budget", o.budget, "atom budget for unrollings"); break;
            case 'f':
                sub->add_option("family", o.family, "qn, qn-prime, nonunique, dagger, transitive, corpus or a corpus name")
                    ->required();
                sub->add_option("--n", o.n, "family parameter");
                break;
            }
        }
        sub->add_flag("--json", o.json, "structured report on standard output");
        sub->callback([&chosen, &c] { chosen = &c; });
    }

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError & e) {
        int code = app.exit(e);
        return code == 0 ? ExitTrue : ExitError;
    }

    std::vector<std::string> args(argv, argv + argc);
    auto started = std::chrono::steady_clock::now();
    Report r;
    std::string error;
    try {
        r = chosen->run(o);
    }
    catch (const std::exception & e) {
        error = e.what();
        r = Report{};
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

    if (!error.empty())
        std::cerr << "error: " << error << "\n";
    if (o.json) {
        json out = {{"command", args}, {"subcommand", chosen->name}, {"verdict", r.verdict},
                    {"witness", r.witness}, {"timings", {{"total_ms", ms}}}, {"budget", r.budget}};
        if (!error.empty())
            out["error"] = error;
        std::cout << out.dump(2) << "\n";
    }
    else if (error.empty()) {
        std::cout << r.verdict << "\n" << r.text;
    }
    return exit_of(r.verdict);
}
