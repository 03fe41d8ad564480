#include "cqapprox/hom.hpp"

#include <algorithm>
#include <stdexcept>

namespace cqa {

HomSearch::HomSearch(const Structure & source, const Structure & target) :
    source_(source),
    target_(target),
    relation_map_(target.relation_map_from(source))
{
    for (int f = 0; f < static_cast<int>(source.facts().size()); ++f)
        facts_.push_back(f);
    for (int e = 0; e < source.element_count(); ++e)
        elements_.push_back(e);
}

void HomSearch::restrict_facts(std::vector<int> fact_ids)
{
    facts_ = std::move(fact_ids);
    prepared_ = false;
}

void HomSearch::restrict_elements(std::vector<int> elements)
{
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    elements_ = std::move(elements);
    prepared_ = false;
}

bool HomSearch::fix(int source_element, int target_element)
{
    for (auto & [s, t] : pins_)
        if (s == source_element && t != target_element)
            return false;
    pins_.emplace_back(source_element, target_element);
    prepared_ = false;
    return true;
}

void HomSearch::restrict_domain(int source_element, const std::vector<int> & allowed)
{
    restrictions_.emplace_back(source_element, allowed);
    prepared_ = false;
}

void HomSearch::prepare()
{
    prepared_ = true;
    infeasible_ = false;
    const int n = source_.element_count();
    const int m = target_.element_count();
    in_scope_.assign(n, 0);
    for (int e : elements_)
        in_scope_[e] = 1;
    facts_of_element_.assign(n, {});
    for (int f : facts_) {
        const auto & fact = source_.facts()[f];
        if (relation_map_[fact.relation] < 0)
            infeasible_ = true;
        for (int e : fact.args) {
            if (!in_scope_[e])
                throw std::logic_error("fact in scope mentions an element outside the search scope");
            auto & list = facts_of_element_[e];
            if (list.empty() || list.back() != f)
                list.push_back(f);
        }
    }
    initial_.assign(n, {});
    initial_sizes_.assign(n, 0);
    for (int e : elements_) {
        initial_[e].assign(m, 1);
        initial_sizes_[e] = m;
    }
    for (auto & [s, t] : pins_) {
        if (!in_scope_[s])
            continue;
        bool had = t >= 0 && t < m && initial_[s][t];
        std::fill(initial_[s].begin(), initial_[s].end(), 0);
        if (had)
            initial_[s][t] = 1;
        initial_sizes_[s] = had ? 1 : 0;
    }
    for (auto & [s, allowed] : restrictions_) {
        if (!in_scope_[s])
            continue;
        std::vector<char> keep(m, 0);
        for (int t : allowed)
            if (t >= 0 && t < m)
                keep[t] = 1;
        int size = 0;
        for (int t = 0; t < m; ++t) {
            initial_[s][t] = initial_[s][t] && keep[t];
            size += initial_[s][t];
        }
        initial_sizes_[s] = size;
    }
    for (int e : elements_)
        if (initial_sizes_[e] == 0)
            infeasible_ = true;
    if (!infeasible_) {
        std::vector<int> queue(facts_.begin(), facts_.end());
        if (injective_)
            for (int e : elements_)
                if (initial_sizes_[e] == 1)
                    queue.push_back(-1 - e);
        if (!propagate(initial_, initial_sizes_, std::move(queue)))
            infeasible_ = true;
    }
}

// Queue entries >= 0 are fact ids to revise; entries < 0 encode an element
// (-1 - e) that just became a singleton and must be removed from the other
// domains under injectivity.
bool HomSearch::propagate(Domains & dom, std::vector<int> & sizes, std::vector<int> queue) const
{
    const int m = target_.element_count();
    std::vector<char> queued(source_.facts().size(), 0);
    for (int q : queue)
        if (q >= 0)
            queued[q] = 1;
    std::vector<std::vector<char>> supported;
    std::size_t head = 0;

    auto shrink = [&](int e, const std::vector<char> & keep, int fact) -> bool {
        bool changed = false;
        auto & d = dom[e];
        for (int t = 0; t < m; ++t)
            if (d[t] && !keep[t]) {
                d[t] = 0;
                --sizes[e];
                changed = true;
            }
        if (sizes[e] == 0)
            return false;
        if (changed) {
            for (int g : facts_of_element_[e])
                if (g != fact && !queued[g]) {
                    queued[g] = 1;
                    queue.push_back(g);
                }
            if (injective_ && sizes[e] == 1)
                queue.push_back(-1 - e);
        }
        return true;
    };

    while (head < queue.size()) {
        int item = queue[head++];
        if (item < 0) {
            int e = -1 - item;
            int value = -1;
            for (int t = 0; t < m; ++t)
                if (dom[e][t]) {
                    value = t;
                    break;
                }
            for (int other : elements_) {
                if (other == e || !dom[other][value])
                    continue;
                dom[other][value] = 0;
                if (--sizes[other] == 0)
                    return false;
                for (int g : facts_of_element_[other])
                    if (!queued[g]) {
                        queued[g] = 1;
                        queue.push_back(g);
                    }
                if (sizes[other] == 1)
                    queue.push_back(-1 - other);
            }
            continue;
        }
        queued[item] = 0;
        const auto & fact = source_.facts()[item];
        const int rel = relation_map_[fact.relation];
        if (rel < 0)
            return false;
        const auto & args = fact.args;
        const std::size_t arity = args.size();

        bool all_single = true;
        int pivot = -1;
        for (std::size_t i = 0; i < arity; ++i) {
            if (sizes[args[i]] != 1)
                all_single = false;
            if (pivot < 0 || sizes[args[i]] < sizes[args[pivot]])
                pivot = static_cast<int>(i);
        }
        if (arity == 0) {
            if (target_.facts_of(rel).empty())
                return false;
            continue;
        }
        if (all_single) {
            std::vector<int> image(arity);
            for (std::size_t i = 0; i < arity; ++i)
                image[i] = static_cast<int>(std::find(dom[args[i]].begin(), dom[args[i]].end(), 1) - dom[args[i]].begin());
            if (!target_.has_fact(rel, image))
                return false;
            continue;
        }

        supported.assign(arity, std::vector<char>(m, 0));
        auto scan = [&](int tf) {
            const auto & t = target_.facts()[tf];
            if (t.relation != rel)
                return;
            for (std::size_t i = 0; i < arity; ++i) {
                if (!dom[args[i]][t.args[i]])
                    return;
                for (std::size_t j = 0; j < i; ++j)
                    if (args[j] == args[i] && t.args[j] != t.args[i])
                        return;
            }
            for (std::size_t i = 0; i < arity; ++i)
                supported[i][t.args[i]] = 1;
        };
        if (sizes[args[pivot]] == 1) {
            int value = static_cast<int>(std::find(dom[args[pivot]].begin(), dom[args[pivot]].end(), 1) - dom[args[pivot]].begin());
            for (int tf : target_.facts_with(value))
                scan(tf);
        }
        else {
            for (int tf : target_.facts_of(rel))
                scan(tf);
        }
        for (std::size_t i = 0; i < arity; ++i) {
            bool first = true;
            for (std::size_t j = 0; j < i; ++j)
                if (args[j] == args[i])
                    first = false;
            if (first && !shrink(args[i], supported[i], item))
                return false;
        }
    }
    return true;
}

int HomSearch::pick(const std::vector<int> & sizes, const std::vector<int> & candidates) const
{
    int best = -1;
    for (int e : candidates)
        if (sizes[e] > 1 && (best < 0 || sizes[e] < sizes[best]))
            best = e;
    return best;
}

bool HomSearch::assign(Domains & dom, std::vector<int> & sizes, int element, int value) const
{
    std::fill(dom[element].begin(), dom[element].end(), 0);
    dom[element][value] = 1;
    sizes[element] = 1;
    std::vector<int> queue(facts_of_element_[element].begin(), facts_of_element_[element].end());
    if (injective_)
        queue.push_back(-1 - element);
    return propagate(dom, sizes, std::move(queue));
}

std::vector<int> HomSearch::solution(const Domains & dom) const
{
    std::vector<int> out(source_.element_count(), -1);
    for (int e : elements_)
        out[e] = static_cast<int>(std::find(dom[e].begin(), dom[e].end(), 1) - dom[e].begin());
    return out;
}

std::optional<std::vector<int>> HomSearch::complete(const Domains & dom, const std::vector<int> & sizes)
{
    ++nodes_;
    int v = pick(sizes, elements_);
    if (v < 0)
        return solution(dom);
    for (int t = 0; t < target_.element_count(); ++t) {
        if (!dom[v][t])
            continue;
        Domains next = dom;
        std::vector<int> next_sizes = sizes;
        if (!assign(next, next_sizes, v, t))
            continue;
        if (auto r = complete(next, next_sizes))
            return r;
    }
    return std::nullopt;
}

bool HomSearch::enumerate(const Domains & dom, const std::vector<int> & sizes, const std::vector<int> & projection,
                          const std::function<bool(const std::vector<int> &)> & visit)
{
    ++nodes_;
    int v = pick(sizes, projection);
    if (v < 0) {
        auto witness = complete(dom, sizes);
        return witness && !visit(*witness);
    }
    for (int t = 0; t < target_.element_count(); ++t) {
        if (!dom[v][t])
            continue;
        Domains next = dom;
        std::vector<int> next_sizes = sizes;
        if (!assign(next, next_sizes, v, t))
            continue;
        if (enumerate(next, next_sizes, projection, visit))
            return true;
    }
    return false;
}

std::optional<std::vector<int>> HomSearch::find()
{
    nodes_ = 0;
    if (!prepared_)
        prepare();
    if (infeasible_)
        return std::nullopt;
    return complete(initial_, initial_sizes_);
}

void HomSearch::for_each(const std::vector<int> & projection, const std::function<bool(const std::vector<int> &)> & visit)
{
    nodes_ = 0;
    if (!prepared_)
        prepare();
    if (infeasible_)
        return;
    std::vector<int> proj;
    for (int e : projection)
        if (in_scope_[e])
            proj.push_back(e);
    enumerate(initial_, initial_sizes_, proj, visit);
}

// --- public API ---------------------------------------------------------

namespace {

std::optional<std::vector<int>> anchored_search(const Structure & source, const Tuple & src_tuple, const Structure & target,
                                                const Tuple & tgt_tuple)
{
    if (src_tuple.size() != tgt_tuple.size())
        throw ArityError("anchor tuples have different lengths (" + std::to_string(src_tuple.size()) + " vs "
                         + std::to_string(tgt_tuple.size()) + ")");
    HomSearch search(source, target);
    auto s = source.elements_of(src_tuple);
    auto t = target.elements_of(tgt_tuple);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!search.fix(s[i], t[i]))
            return std::nullopt;
    return search.find();
}

Hom to_hom(const Structure & source, const Structure & target, const std::vector<int> & assignment)
{
    Hom h;
    for (int e = 0; e < source.element_count(); ++e)
        if (assignment[e] >= 0)
            h.emplace(source.name(e), target.name(assignment[e]));
    return h;
}

} // namespace

std::optional<Hom> find_hom(const Structure & source, const Tuple & src_tuple, const Structure & target,
                            const Tuple & tgt_tuple)
{
    auto a = anchored_search(source, src_tuple, target, tgt_tuple);
    if (!a)
        return std::nullopt;
    return to_hom(source, target, *a);
}

std::optional<Hom> find_hom(const ConjunctiveQuery & source, const ConjunctiveQuery & target)
{
    return find_hom(Structure::from_query(source), source.head(), Structure::from_query(target), target.head());
}

std::optional<Hom> find_hom(const ConjunctiveQuery & source, const Database & target, const Tuple & tgt_tuple)
{
    return find_hom(Structure::from_query(source), source.head(), Structure::from_atoms(target.facts(), tgt_tuple), tgt_tuple);
}

bool is_homomorphism(const Structure & source, const Tuple & src_tuple, const Structure & target, const Tuple & tgt_tuple,
                     const Hom & h)
{
    if (src_tuple.size() != tgt_tuple.size())
        return false;
    for (std::size_t i = 0; i < src_tuple.size(); ++i) {
        auto it = h.find(src_tuple[i]);
        if (it == h.end() || it->second != tgt_tuple[i])
            return false;
    }
    for (const auto & f : source.facts()) {
        auto rel = target.relation(source.relations()[f.relation]);
        if (!rel)
            return false;
        std::vector<int> image;
        for (int e : f.args) {
            auto it = h.find(source.name(e));
            if (it == h.end())
                return false;
            auto t = target.element(it->second);
            if (!t)
                return false;
            image.push_back(*t);
        }
        if (!target.has_fact(*rel, image))
            return false;
    }
    return true;
}

std::set<Tuple> evaluate(const ConjunctiveQuery & q, const Database & db)
{
    auto source = Structure::from_query(q);
    auto target = Structure::from_database(db);
    std::set<Tuple> answers;
    HomSearch search(source, target);
    auto head = source.elements_of(q.head());
    search.for_each(head, [&](const std::vector<int> & sol) {
        Tuple t;
        for (int e : head)
            t.push_back(target.name(sol[e]));
        answers.insert(std::move(t));
        return true;
    });
    return answers;
}

bool evaluates_to(const ConjunctiveQuery & q, const Database & db, const Tuple & tuple)
{
    return find_hom(q, db, tuple).has_value();
}

bool contains(const ConjunctiveQuery & q, const ConjunctiveQuery & q2)
{
    if (q.arity() != q2.arity())
        throw ArityError("containment needs equal head arity (" + std::to_string(q.arity()) + " vs "
                         + std::to_string(q2.arity()) + ")");
    return find_hom(q2, q).has_value();
}

bool equivalent(const ConjunctiveQuery & q, const ConjunctiveQuery & q2)
{
    return contains(q, q2) && contains(q2, q);
}

namespace {

std::optional<Hom> removal_map(const ConjunctiveQuery & q, const Atom & atom)
{
    auto smaller = q.without_atom(atom);
    return find_hom(Structure::from_query(q), q.head(), Structure::from_query(smaller), smaller.head());
}

} // namespace

ConjunctiveQuery core(const ConjunctiveQuery & q)
{
    ConjunctiveQuery current = q;
    for (;;) {
        bool shrunk = false;
        for (const auto & atom : current.atoms()) {
            auto h = removal_map(current, atom);
            if (!h)
                continue;
            std::vector<Atom> image;
            for (auto a : current.atoms()) {
                for (auto & t : a.args)
                    t = h->at(t);
                image.push_back(std::move(a));
            }
            current = current.with_atoms(std::move(image));
            shrunk = true;
            break;
        }
        if (!shrunk)
            return current;
    }
}

bool is_core(const ConjunctiveQuery & q)
{
    for (const auto & atom : q.atoms())
        if (removal_map(q, atom))
            return false;
    return true;
}

std::vector<Hom> endomorphisms(const ConjunctiveQuery & q)
{
    auto s = Structure::from_query(q);
    HomSearch search(s, s);
    auto head = s.elements_of(q.head());
    for (std::size_t i = 0; i < head.size(); ++i)
        if (!search.fix(head[i], head[i]))
            return {};
    std::vector<int> all;
    for (int e = 0; e < s.element_count(); ++e)
        all.push_back(e);
    std::vector<std::vector<int>> found;
    search.for_each(all, [&](const std::vector<int> & sol) {
        found.push_back(sol);
        return true;
    });
    std::sort(found.begin(), found.end());
    std::vector<Hom> out;
    for (auto & f : found)
        out.push_back(to_hom(s, s, f));
    return out;
}

bool isomorphic(const ConjunctiveQuery & q, const ConjunctiveQuery & q2)
{
    if (q.arity() != q2.arity() || q.atoms().size() != q2.atoms().size() || q.variables().size() != q2.variables().size()
        || q.schema() != q2.schema())
        return false;
    auto s = Structure::from_query(q);
    auto t = Structure::from_query(q2);
    HomSearch search(s, t);
    search.set_injective(true);
    auto a = s.elements_of(q.head());
    auto b = t.elements_of(q2.head());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!search.fix(a[i], b[i]))
            return false;
    // the head patterns must coincide: x_i = x_j iff y_i = y_j
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if ((a[i] == a[j]) != (b[i] == b[j]))
                return false;
    return search.find().has_value();
}

} // namespace cqa
