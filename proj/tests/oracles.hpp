#pragma once

// Test-side reference implementations. Deliberately naive and independent of
// the library's algorithms: nothing here calls refine, type_table, the solver
// or the library evaluators.

#include "mlgame/mlgame.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using namespace mlgame;

/// Random model over `props` with 1..max_worlds worlds named w0, w1, ...
inline std::shared_ptr<const kripke_model> random_model(std::mt19937& rng, int max_worlds,
                                                        const std::vector<std::string>& props,
                                                        double edge_p = 0.35)
{
    std::uniform_int_distribution<int> size(1, max_worlds);
    std::bernoulli_distribution edge(edge_p), holds(0.5);
    const int n = size(rng);
    std::vector<world_id> worlds;
    for (int i = 0; i < n; ++i)
        worlds.push_back("w" + std::to_string(i));
    std::vector<std::pair<world_id, world_id>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (edge(rng))
                edges.emplace_back(worlds[i], worlds[j]);
    std::map<std::string, std::vector<world_id>> val;
    for (const auto& p : props) {
        auto& ws = val[p];
        for (const auto& w : worlds)
            if (holds(rng))
                ws.push_back(w);
    }
    return make_model(worlds, edges, val);
}

inline pointed_model random_pointed(std::mt19937& rng, int max_worlds,
                                    const std::vector<std::string>& props)
{
    auto m = random_model(rng, max_worlds, props);
    std::uniform_int_distribution<std::size_t> pick(0, m->size() - 1);
    return pointed_model(m, static_cast<kripke_model::index>(pick(rng)));
}

inline model_set random_set(std::mt19937& rng, int max_size, int max_worlds,
                            const std::vector<std::string>& props, int min_size = 1)
{
    std::uniform_int_distribution<int> size(min_size, max_size);
    std::vector<pointed_model> out;
    for (int i = size(rng); i > 0; --i)
        out.push_back(random_pointed(rng, max_worlds, props));
    return model_set(out);
}

/// Direct recursive truth definition, looking propositions up by name.
inline bool holds(const kripke_model& m, kripke_model::index w, const formula& f)
{
    switch (f.kind()) {
    case ml_kind::top:
        return true;
    case ml_kind::bot:
        return false;
    case ml_kind::prop:
    case ml_kind::neg_prop: {
        const auto val = m.valuation();
        const auto& ws = val.at(f.name());
        const bool in = std::find(ws.begin(), ws.end(), m.name(w)) != ws.end();
        return f.kind() == ml_kind::prop ? in : !in;
    }
    case ml_kind::conj:
        return holds(m, w, f.left()) && holds(m, w, f.right());
    case ml_kind::disj:
        return holds(m, w, f.left()) || holds(m, w, f.right());
    case ml_kind::diamond:
        for (auto v : m.successors(w))
            if (holds(m, v, f.child()))
                return true;
        return false;
    case ml_kind::box:
        for (auto v : m.successors(w))
            if (!holds(m, v, f.child()))
                return false;
        return true;
    }
    return false;
}

inline bool holds(const pointed_model& p, const formula& f) { return holds(p.model(), p.point(), f); }

inline bool separates(const formula& f, const model_set& a, const model_set& b)
{
    for (const auto& p : a)
        if (!holds(p, f))
            return false;
    for (const auto& p : b)
        if (holds(p, f))
            return false;
    return true;
}

/// Counts of operators by direct recursion.
inline std::pair<int, int> sizes(const formula& f)
{
    if (f.is_literal())
        return {0, 0};
    if (f.is_modal()) {
        auto [m, k] = sizes(f.child());
        return {m + 1, k};
    }
    auto [m1, k1] = sizes(f.left());
    auto [m2, k2] = sizes(f.right());
    return {m1 + m2, k1 + k2 + 1};
}

/// n-bisimilarity straight from the back-and-forth clauses: Z_0 relates
/// worlds with the same true propositions, Z_{i+1} keeps the pairs of Z_0
/// whose successors are matched both ways in Z_i.
inline bool n_bisimilar(const pointed_model& p, const pointed_model& q, int n)
{
    const auto& a = p.model();
    const auto& b = q.model();
    auto true_props = [](const kripke_model& m, kripke_model::index w) {
        std::set<std::string> out;
        for (const auto& [prop, ws] : m.valuation())
            if (std::find(ws.begin(), ws.end(), m.name(w)) != ws.end())
                out.insert(prop);
        return out;
    };
    std::vector<std::vector<bool>> z0(a.size(), std::vector<bool>(b.size()));
    for (kripke_model::index v = 0; v < a.size(); ++v)
        for (kripke_model::index w = 0; w < b.size(); ++w)
            z0[v][w] = true_props(a, v) == true_props(b, w);
    auto z = z0;
    for (int i = 0; i < n; ++i) {
        auto next = z0;
        for (kripke_model::index v = 0; v < a.size(); ++v)
            for (kripke_model::index w = 0; w < b.size(); ++w) {
                if (!next[v][w])
                    continue;
                bool ok = true;
                for (auto v2 : a.successors(v)) {
                    bool matched = false;
                    for (auto w2 : b.successors(w))
                        matched = matched || z[v2][w2];
                    ok = ok && matched;
                }
                for (auto w2 : b.successors(w)) {
                    bool matched = false;
                    for (auto v2 : a.successors(v))
                        matched = matched || z[v2][w2];
                    ok = ok && matched;
                }
                next[v][w] = ok;
            }
        z = std::move(next);
    }
    return z[p.point()][q.point()];
}

/// Chromatic number by trying every colouring with 1, 2, ... colours.
inline int brute_chromatic(const graph& g)
{
    const auto n = g.size();
    if (n == 0)
        return 0;
    for (int c = 1; c <= static_cast<int>(n); ++c) {
        std::vector<int> col(n, 0);
        while (true) {
            bool proper = true;
            for (auto [u, v] : g.edges)
                proper = proper && col[u] != col[v];
            if (proper)
                return c;
            std::size_t i = 0;
            for (; i < n; ++i) {
                if (++col[i] < c)
                    break;
                col[i] = 0;
            }
            if (i == n)
                break;
        }
    }
    return static_cast<int>(n);
}

inline graph random_graph(std::mt19937& rng, int max_vertices, double p = 0.4)
{
    std::uniform_int_distribution<int> size(1, max_vertices);
    std::bernoulli_distribution edge(p);
    graph g;
    const int n = size(rng);
    for (int i = 0; i < n; ++i)
        g.vertices.push_back("v" + std::to_string(i));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (edge(rng))
                g.add_edge(i, j);
    return g;
}

/// Random NNF formula over `props` with exactly `nodes` operators.
inline formula random_formula(std::mt19937& rng, int nodes, const std::vector<std::string>& props)
{
    if (nodes == 0) {
        std::uniform_int_distribution<std::size_t> pick(0, 1 + 2 * props.size());
        auto i = pick(rng);
        if (i == 0)
            return formula::top();
        if (i == 1)
            return formula::bot();
        const auto& p = props[(i - 2) / 2];
        return (i - 2) % 2 == 0 ? formula::prop(p) : formula::neg_prop(p);
    }
    std::uniform_int_distribution<int> op(0, 3);
    switch (op(rng)) {
    case 0:
        return formula::diamond(random_formula(rng, nodes - 1, props));
    case 1:
        return formula::box(random_formula(rng, nodes - 1, props));
    default: {
        std::uniform_int_distribution<int> split(0, nodes - 1);
        const int l = split(rng);
        auto a = random_formula(rng, l, props);
        auto b = random_formula(rng, nodes - 1 - l, props);
        return op(rng) % 2 ? formula::conj(a, b) : formula::disj(a, b);
    }
    }
}

/// Every sequence of D choices against `s`: each move legal, each leaf separating.
inline bool wins_all_playouts(const game_position& pos, const spoiler_strategy& s)
{
    if (s.is_leaf()) {
        const auto& lit = std::get<formula>(s.step);
        return lit.is_literal() && oracle::separates(lit, pos.left, pos.right);
    }
    const auto& mv = std::get<move>(s.step);
    try {
        if (const auto* sp = std::get_if<split_move>(&mv)) {
            if (sp->m1 + sp->m2 != pos.m || sp->k1 + sp->k2 + 1 != pos.k)
                return false;
            return wins_all_playouts(apply_move(pos, mv, side::left), s.next.at(0)) &&
                   wins_all_playouts(apply_move(pos, mv, side::right), s.next.at(1));
        }
        return wins_all_playouts(apply_move(pos, mv), s.next.at(0));
    } catch (const std::exception&) {
        return false;
    }
}

/// Unravels p to a tree of the given depth (labels kept), then hangs random
/// structure below the leaves. The result is depth-bisimilar to p.
inline pointed_model planted_twin(std::mt19937& rng, const pointed_model& p, int depth,
                                  const std::vector<std::string>& props)
{
    std::vector<world_id> worlds;
    std::vector<std::pair<world_id, world_id>> edges;
    std::map<std::string, std::vector<world_id>> val;
    for (const auto& q : props)
        val[q];
    const auto& m = p.model();
    auto label_of = [&](kripke_model::index w, const world_id& name) {
        for (std::size_t i = 0; i < m.props().size(); ++i)
            if (m.holds(i, w))
                val[m.props()[i]].push_back(name);
    };
    int counter = 0;
    std::vector<world_id> leaves;
    auto go = [&](auto&& self, kripke_model::index w, int d) -> world_id {
        world_id name = "u" + std::to_string(counter++);
        worlds.push_back(name);
        label_of(w, name);
        if (d == 0) {
            leaves.push_back(name);
            return name;
        }
        for (auto v : m.successors(w))
            edges.emplace_back(name, self(self, v, d - 1));
        return name;
    };
    auto root = go(go, p.point(), depth);

    auto tail = random_model(rng, 3, props);
    for (const auto& w : tail->worlds())
        worlds.push_back("t" + w);
    for (const auto& [a, b] : tail->edge_list())
        edges.emplace_back("t" + a, "t" + b);
    for (const auto& [q, ws] : tail->valuation())
        for (const auto& w : ws)
            val[q].push_back("t" + w);
    std::bernoulli_distribution link(0.5);
    for (const auto& leaf : leaves)
        for (const auto& w : tail->worlds())
            if (link(rng))
                edges.emplace_back(leaf, "t" + w);
    return pointed_model(make_model(worlds, edges, val), root);
}

} // namespace oracle
