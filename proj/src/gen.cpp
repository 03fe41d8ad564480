#include "cqapprox/gen.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace cqa {

namespace {

std::string x_var(int level, int j)
{
    return "x" + std::to_string(level) + "_" + std::to_string(j);
}

std::string y_var(const std::string & word)
{
    return word.empty() ? "y0" : "y_" + word;
}

} // namespace

ConjunctiveQuery gen_qn(int n)
{
    if (n < 1)
        throw std::invalid_argument("n must be at least 1");
    std::vector<Atom> atoms{{"R", {"x0", x_var(1, 1), x_var(1, 2)}}, {"R", {"x0", x_var(1, 2), x_var(1, 1)}}};
    for (int i = 1; i < n; ++i)
        for (int j = 1; j <= 2; ++j) {
            atoms.push_back({"R", {x_var(i, j), x_var(i + 1, 1), x_var(i + 1, 2)}});
            atoms.push_back({"R", {x_var(i, j), x_var(i + 1, 2), x_var(i + 1, 1)}});
        }
    return ConjunctiveQuery({}, std::move(atoms), "q" + std::to_string(n));
}

ConjunctiveQuery gen_qn_prime(int n)
{
    if (n < 1)
        throw std::invalid_argument("n must be at least 1");
    if (n > qn_prime_guard)
        throw BudgetExceeded("the blowup family is limited to n <= " + std::to_string(qn_prime_guard));
    std::vector<Atom> atoms;
    std::function<void(const std::string &)> grow = [&](const std::string & w) {
        if (static_cast<int>(w.size()) >= n)
            return;
        atoms.push_back({"R", {y_var(w), y_var(w + "1"), y_var(w + "2")}});
        atoms.push_back({"R", {y_var(w), y_var(w + "2"), y_var(w + "1")}});
        grow(w + "1");
        grow(w + "2");
    };
    grow("");
    return ConjunctiveQuery({}, std::move(atoms), "qp" + std::to_string(n));
}

bool Tournament::is_tournament() const
{
    for (auto [a, b] : edges)
        if (a == b || a < 1 || b < 1 || a > nodes || b > nodes)
            return false;
    for (int i = 1; i <= nodes; ++i)
        for (int j = i + 1; j <= nodes; ++j)
            if (has(i, j) == has(j, i))
                return false;
    return true;
}

ConjunctiveQuery Tournament::to_query() const
{
    std::vector<Atom> atoms;
    for (auto [a, b] : edges)
        atoms.push_back({"E", {"v" + std::to_string(a), "v" + std::to_string(b)}});
    return ConjunctiveQuery({}, std::move(atoms));
}

Tournament dagger_base(int k)
{
    Tournament g;
    g.nodes = k + 1;
    g.add(1, 2);
    g.add(2, 3);
    g.add(3, 1);
    if (k == 2)
        return g;
    g.add(4, 1);
    g.add(4, 2);
    g.add(4, 3);
    if (k == 3)
        return g;
    if (k != 4)
        throw std::invalid_argument("base graphs exist for k = 2, 3, 4");
    g.add(5, 1);
    g.add(5, 2);
    g.add(3, 5);
    g.add(5, 4);
    return g;
}

Tournament gen_dagger(int k)
{
    if (k < 2)
        throw std::invalid_argument("k must be at least 2");
    if (k <= 3)
        return dagger_base(k);
    Tournament g = dagger_base(3);
    for (int m = 4; m < k + 1; ++m) {
        // g has nodes v1..vm; add v_{m+1}.
        int fresh = m + 1;
        for (int i = 1; i < m; ++i) {
            if (g.has(i, i + 1))
                g.add(fresh, i);
            else
                g.add(i, fresh);
        }
        if (g.has(m, 1))
            g.add(fresh, m);
        else
            g.add(m, fresh);
        g.nodes = fresh;
    }
    return g;
}

bool verify_dagger(const Tournament & g, std::pair<std::set<int>, int> * violation)
{
    const int n = g.nodes;
    const int k = n - 1;
    // conn(v, B) is determined by the orientation towards each member of B.
    auto conn = [&](int v, const std::vector<int> & b) {
        std::vector<int> sig;
        for (int p : b)
            sig.push_back(g.has(v, p) ? 1 : -1);
        return sig;
    };
    std::vector<int> b;
    std::function<bool(int)> subsets = [&](int from) -> bool {
        int size = static_cast<int>(b.size());
        if (size >= 2 && size <= k - 1) {
            std::vector<int> outside;
            for (int v = 1; v <= n; ++v)
                if (std::find(b.begin(), b.end(), v) == b.end())
                    outside.push_back(v);
            for (int v : outside) {
                bool distinguished = false;
                for (int w : outside)
                    if (w != v && conn(v, b) != conn(w, b)) {
                        distinguished = true;
                        break;
                    }
                if (!distinguished) {
                    if (violation)
                        *violation = {std::set<int>(b.begin(), b.end()), v};
                    return false;
                }
            }
        }
        if (size >= k - 1)
            return true;
        for (int v = from; v <= n; ++v) {
            b.push_back(v);
            bool ok = subsets(v + 1);
            b.pop_back();
            if (!ok)
                return false;
        }
        return true;
    };
    return subsets(1);
}

Tournament transitive_tournament(int nodes)
{
    Tournament g;
    g.nodes = nodes;
    for (int i = 1; i <= nodes; ++i)
        for (int j = i + 1; j <= nodes; ++j)
            g.add(i, j);
    return g;
}

std::string to_dot(const Tournament & g)
{
    std::ostringstream out;
    out << "digraph G {\n";
    for (int i = 1; i <= g.nodes; ++i)
        out << "  v" << i << ";\n";
    for (auto [a, b] : g.edges)
        out << "  v" << a << " -> v" << b << ";\n";
    out << "}\n";
    return out.str();
}

std::string gaifman_dot(const ConjunctiveQuery & q)
{
    auto g = gaifman(q);
    std::ostringstream out;
    out << "graph G {\n";
    for (const auto & v : g.nodes)
        out << "  \"" << v << "\";\n";
    for (const auto & [a, b] : g.edges)
        out << "  \"" << a << "\" -- \"" << b << "\";\n";
    out << "}\n";
    return out.str();
}

ConjunctiveQuery gen_nonunique(int n)
{
    if (n < 1)
        throw std::invalid_argument("n must be at least 1");
    std::vector<Atom> atoms;
    auto x = [](int i) { return "x" + std::to_string(i); };
    for (int i = 1; i <= n; ++i)
        atoms.push_back({"Pa", {x(i), x(i + 1)}});
    atoms.push_back({"Pb", {x(1), x(1)}});
    atoms.push_back({"Pb", {x(n + 1), x(n + 1)}});
    return ConjunctiveQuery({}, std::move(atoms), "qn" + std::to_string(n));
}

namespace {

std::map<std::string, CorpusEntry> build_corpus()
{
    std::map<std::string, CorpusEntry> c;
    auto q = [&](const std::string & name, const std::string & text, const std::string & what) {
        c[name] = {parse_query(text), std::nullopt, what};
    };
    auto d = [&](const std::string & name, const std::string & text, const std::string & what) {
        c[name] = {std::nullopt, parse_database(text), what};
    };
    q("fig1_q", "q() :- Pa(x,y), Pa(y,x), Pa(y,z), Pa(z,y), Pb(z,x), Pb(x,z).",
      "Pa/Pb triangle without a homomorphism into an acyclic query");
    q("fig1_qprime", "q() :- Pa(x,y1), Pa(y1,x), Pa(y2,z), Pa(z,y2), Pb(z,x), Pb(x,z).",
      "acyclic overapproximation of fig1_q");
    q("fig2_q", "q() :- E(v2,v1), E(v3,v2), E(v1,v3).", "directed triangle, width 2");
    c["fig2_qprime"] = {dagger_base(3).to_query(), std::nullopt, "tournament on four nodes"};
    q("triangle", "q() :- E(x,y), E(y,z), E(z,x).", "directed triangle");
    q("c2", "q() :- E(x,y), E(y,x).", "directed 2-cycle");
    q("loop", "q() :- E(x,x).", "self loop");
    q("edge", "q() :- E(x,y).", "single edge");
    for (int n = 1; n <= 4; ++n) {
        std::vector<Atom> atoms;
        for (int i = 0; i < n; ++i)
            atoms.push_back({"E", {"x" + std::to_string(i), "x" + std::to_string(i + 1)}});
        c["path" + std::to_string(n)] = {ConjunctiveQuery({}, atoms), std::nullopt, "directed path"};
    }
    for (int n = 1; n <= 3; ++n) {
        auto conj = disjoint_conjunction(*c["fig1_qprime"].query, gen_nonunique(n));
        c["nonunique_q" + std::to_string(n)] = {conj, std::nullopt, "fig1_qprime conjoined with a Pa-path"};
    }
    for (int n = 2; n <= 4; ++n) {
        c["size_q" + std::to_string(n)] = {gen_qn(n), std::nullopt, "ternary blowup family"};
        c["size_qprime" + std::to_string(n)] = {gen_qn_prime(n), std::nullopt, "its overapproximation"};
    }
    for (int k = 2; k <= 4; ++k)
        c["fig3_k" + std::to_string(k)] = {dagger_base(k).to_query(), std::nullopt, "dagger tournament"};
    d("c2_db", "E(a,b).\nE(b,a).\n", "2-cycle database");
    d("triangle_db", "E(a,b).\nE(b,c).\nE(c,a).\n", "triangle database");
    d("edge_db", "E(a,b).\n", "single edge database");
    return c;
}

} // namespace

const std::map<std::string, CorpusEntry> & corpus()
{
    static const auto c = build_corpus();
    return c;
}

const ConjunctiveQuery & corpus_query(const std::string & name)
{
    auto it = corpus().find(name);
    if (it == corpus().end() || !it->second.query)
        throw std::out_of_range("no corpus query named " + name);
    return *it->second.query;
}

const Database & corpus_database(const std::string & name)
{
    auto it = corpus().find(name);
    if (it == corpus().end() || !it->second.database)
        throw std::out_of_range("no corpus database named " + name);
    return *it->second.database;
}

} // namespace cqa
