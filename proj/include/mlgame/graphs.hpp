#pragma once

#include "game.hpp"
#include "hierarchy.hpp"
#include "strategy.hpp"

#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mlgame {

class graph_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Simple undirected graph. Vertices are named; edges are index pairs (u < v).
struct graph {
    std::vector<std::string> vertices;
    std::set<std::pair<std::size_t, std::size_t>> edges;

    std::size_t size() const { return vertices.size(); }

    void add_edge(std::size_t u, std::size_t v)
    {
        if (u == v)
            throw graph_error("self-loops are not allowed");
        if (u >= size() || v >= size())
            throw graph_error("edge endpoint out of range");
        edges.emplace(std::min(u, v), std::max(u, v));
    }

    bool adjacent(std::size_t u, std::size_t v) const
    {
        return edges.contains({std::min(u, v), std::max(u, v)});
    }
};

namespace detail {

/// The sets a such that p is ⊎{(M_a, a) : a ∈ result}, or throws.
inline std::vector<hf_set> unwrap_join(const pointed_model& p, std::size_t arity)
{
    const auto& m = p.model();
    const auto& children = m.successors(p.point());
    if (children.size() != arity)
        throw graph_error("member is not a join of " + std::to_string(arity) +
                          " hierarchy model(s)");
    std::vector<hf_set> sets;
    std::vector<pointed_model> parts;
    for (auto c : children) {
        try {
            sets.push_back(hf_set::parse(m.name(c)));
        } catch (const hierarchy_error&) {
            throw graph_error("member child '" + m.name(c) + "' is not a set literal");
        }
        parts.push_back(model_of(sets.back()));
    }
    if (!(join(model_set(parts)).model() == m) || !m.props().empty())
        throw graph_error("member is not a join of hierarchy models");
    return sets;
}

} // namespace detail

/// G(𝕍, 𝔼): one vertex per 𝕍 member ⊎{(M_a, a)}, named by a; an edge {a, b}
/// for each 𝔼 member ⊎{(M_a, a), (M_b, b)} whose ends are both vertices.
inline graph graph_of(const model_set& vv, const model_set& ee)
{
    std::set<hf_set> verts;
    for (const auto& p : vv)
        verts.insert(detail::unwrap_join(p, 1).front());
    graph g;
    std::map<hf_set, std::size_t> index;
    for (const auto& a : verts) {
        index.emplace(a, g.vertices.size());
        g.vertices.push_back(a.to_string());
    }
    for (const auto& p : ee) {
        auto ab = detail::unwrap_join(p, 2);
        auto i = index.find(ab[0]), j = index.find(ab[1]);
        if (i != index.end() && j != index.end())
            g.add_edge(i->second, j->second);
    }
    return g;
}

/// Exact chromatic number by DSATUR branch and bound, seeded with a greedy
/// clique lower bound. Throws if the graph has more than `cap` vertices.
inline int chromatic_number(const graph& g, std::size_t cap = 16)
{
    const auto n = g.size();
    if (n > cap)
        throw graph_error("graph has " + std::to_string(n) + " vertices, above the cap of " +
                          std::to_string(cap));
    if (n > 64)
        throw graph_error("chromatic_number supports at most 64 vertices");
    if (n == 0)
        return 0;

    std::vector<std::uint64_t> adj(n, 0);
    for (auto [u, v] : g.edges) {
        adj[u] |= std::uint64_t{1} << v;
        adj[v] |= std::uint64_t{1} << u;
    }
    auto degree = [&](std::size_t v) { return std::popcount(adj[v]); };

    // greedy clique, highest degree first
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return degree(a) > degree(b); });
    std::uint64_t clique = 0;
    for (auto v : order)
        if ((adj[v] & clique) == clique)
            clique |= std::uint64_t{1} << v;
    const int lower = std::popcount(clique);

    std::vector<int> color(n, -1);
    int best = static_cast<int>(n) + 1;

    auto pick = [&]() -> std::size_t {
        std::size_t chosen = n;
        int best_sat = -1, best_deg = -1;
        for (std::size_t v = 0; v < n; ++v) {
            if (color[v] >= 0)
                continue;
            std::uint64_t seen = 0;
            int deg = 0;
            for (std::size_t u = 0; u < n; ++u)
                if ((adj[v] >> u) & 1U) {
                    if (color[u] >= 0)
                        seen |= std::uint64_t{1} << color[u];
                    else
                        ++deg;
                }
            const int sat = std::popcount(seen);
            if (sat > best_sat || (sat == best_sat && deg > best_deg)) {
                chosen = v;
                best_sat = sat;
                best_deg = deg;
            }
        }
        return chosen;
    };

    auto search = [&](auto&& self, std::size_t colored, int used) -> void {
        if (used >= best || best == lower)
            return;
        if (colored == n) {
            best = used;
            return;
        }
        const auto v = pick();
        std::uint64_t blocked = 0;
        for (std::size_t u = 0; u < n; ++u)
            if (((adj[v] >> u) & 1U) && color[u] >= 0)
                blocked |= std::uint64_t{1} << color[u];
        for (int c = 0; c < used; ++c) {
            if ((blocked >> c) & 1U)
                continue;
            color[v] = c;
            self(self, colored + 1, used);
            color[v] = -1;
        }
        if (used + 1 < best) {
            color[v] = used;
            self(self, colored + 1, used + 1);
            color[v] = -1;
        }
    };
    search(search, 0, 0);
    return best;
}

/// "u v" per edge, by vertex name.
inline std::string to_edge_list(const graph& g)
{
    std::ostringstream out;
    for (auto [u, v] : g.edges)
        out << g.vertices[u] << ' ' << g.vertices[v] << '\n';
    return out.str();
}

namespace detail {

/// k < log2(chi), in integers.
inline bool below_log2(int k, int chi)
{
    return k >= 0 && k < 62 && (std::int64_t{1} << k) < chi;
}

} // namespace detail

/// D's strategy on positions (m, k, 𝕍, 𝔼) with k < log₂ χ(G(𝕍, 𝔼)). Splits:
/// answer with the first part whose graph keeps k_i < log₂ χ. Successor moves
/// leave some pointed model on both sides; from then on D plays the
/// bisimulation strategy on that pair.
class coloring_responder {
public:
    explicit coloring_responder(const game_position& pos)
    {
        const int chi = chromatic_number(graph_of(pos.left, pos.right));
        if (chi < 2 || !detail::below_log2(pos.k, chi))
            throw game_error("coloring strategy needs k < log2(chi) with chi = " +
                             std::to_string(chi));
    }

    std::optional<side> respond(const game_position& pos, const move& mv)
    {
        if (bisim_)
            return bisim_->respond(pos, mv);

        if (const auto* sp = std::get_if<split_move>(&mv)) {
            auto chi_of = [&](const model_set& part) {
                return sp->on == side::left ? chromatic_number(graph_of(part, pos.right))
                                            : chromatic_number(graph_of(pos.left, part));
            };
            if (detail::below_log2(sp->k1, chi_of(sp->part1)))
                return side::left;
            if (detail::below_log2(sp->k2, chi_of(sp->part2)))
                return side::right;
            throw game_error("no split branch keeps k below log2(chi)");
        }

        const auto next = apply_move(pos, mv);
        for (const auto& x : next.left)
            for (const auto& y : next.right)
                if (auto w = n_bisimilar(x, y, next.m)) {
                    bisim_.emplace(next, std::move(*w));
                    return std::nullopt;
                }
        throw game_error("successor move left no bisimilar pair across the sides");
    }

    bool handed_off() const { return bisim_.has_value(); }

private:
    std::optional<bisim_responder> bisim_;
};

} // namespace mlgame
