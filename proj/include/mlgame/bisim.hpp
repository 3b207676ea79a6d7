#pragma once

#include "kripke.hpp"

#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

namespace mlgame {

namespace detail {

/// Successor structure of one model, or of a disjoint union of two.
struct frame_view {
    std::vector<std::uint64_t> labels;
    std::vector<std::vector<std::uint32_t>> succ;

    static frame_view of(const kripke_model& m)
    {
        frame_view v;
        for (kripke_model::index w = 0; w < m.size(); ++w) {
            v.labels.push_back(m.label(w));
            v.succ.push_back(m.successors(w));
        }
        return v;
    }

    static frame_view of(const kripke_model& a, const kripke_model& b)
    {
        auto v = of(a);
        const auto offset = static_cast<std::uint32_t>(a.size());
        for (kripke_model::index w = 0; w < b.size(); ++w) {
            v.labels.push_back(b.label(w));
            auto s = b.successors(w);
            for (auto& x : s)
                x += offset;
            v.succ.push_back(std::move(s));
        }
        return v;
    }
};

/// Set-based colour refinement. rounds[i][w] is the class of w under ~ᵢ;
/// class ids are ranks of sorted signatures, so they depend only on structure,
/// never on world names. With depth = nullopt, refines until stable.
inline std::vector<std::vector<std::uint32_t>> refine(const frame_view& f,
                                                      std::optional<int> depth)
{
    using signature = std::pair<std::uint64_t, std::vector<std::uint32_t>>;
    const auto n = f.labels.size();
    std::vector<std::vector<std::uint32_t>> rounds;

    auto assign = [&](const std::vector<signature>& sigs) {
        std::map<signature, std::uint32_t> rank;
        for (const auto& s : sigs)
            rank.emplace(s, 0);
        std::uint32_t next = 0;
        for (auto& [s, id] : rank)
            id = next++;
        std::vector<std::uint32_t> out(n);
        for (std::size_t w = 0; w < n; ++w)
            out[w] = rank.at(sigs[w]);
        return std::pair{out, rank.size()};
    };

    std::vector<signature> sigs(n);
    for (std::size_t w = 0; w < n; ++w)
        sigs[w] = {f.labels[w], {}};
    auto [first, classes] = assign(sigs);
    rounds.push_back(std::move(first));

    for (int i = 1; !depth || i <= *depth; ++i) {
        const auto& prev = rounds.back();
        for (std::size_t w = 0; w < n; ++w) {
            std::vector<std::uint32_t> s;
            for (auto v : f.succ[w])
                s.push_back(prev[v]);
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            sigs[w] = {f.labels[w], std::move(s)};
        }
        auto [next, count] = assign(sigs);
        rounds.push_back(std::move(next));
        if (!depth && count == classes)
            break;
        classes = count;
    }
    return rounds;
}

inline void require_same_signature(const pointed_model& p, const pointed_model& q)
{
    if (p.model().props() != q.model().props())
        throw model_error("pointed models have different signatures");
}

} // namespace detail

/// Same propositions true at both points.
inline bool prop_equivalent(const pointed_model& p, const pointed_model& q)
{
    detail::require_same_signature(p, q);
    return p.model().label(p.point()) == q.model().label(q.point());
}

/// Relations Z_depth ⊆ … ⊆ Z_0 over worlds(p.model) × worlds(q.model).
/// layers[i] holds Z_i as sorted (world of p's model, world of q's model) pairs.
struct bisim_witness {
    pointed_model left;
    pointed_model right;
    int depth = 0;
    std::vector<std::vector<std::pair<kripke_model::index, kripke_model::index>>> layers;

    bool related(int layer, kripke_model::index v, kripke_model::index w) const
    {
        const auto& z = layers.at(layer);
        return std::binary_search(z.begin(), z.end(), std::pair{v, w});
    }
};

/// (p) ∼ₙ (q) without building a witness.
inline bool are_n_bisimilar(const pointed_model& p, const pointed_model& q, int n)
{
    detail::require_same_signature(p, q);
    auto rounds = detail::refine(detail::frame_view::of(p.model(), q.model()), n);
    const auto offset = p.model().size();
    return rounds[n][p.point()] == rounds[n][offset + q.point()];
}

/// Full bisimilarity, by refinement to the fixpoint.
inline bool are_bisimilar(const pointed_model& p, const pointed_model& q)
{
    detail::require_same_signature(p, q);
    auto rounds = detail::refine(detail::frame_view::of(p.model(), q.model()), std::nullopt);
    return rounds.back()[p.point()] == rounds.back()[p.model().size() + q.point()];
}

/// A witness for (p) ∼ₙ (q), or nullopt. Layer i relates every pair of worlds
/// that refinement puts in the same ~ᵢ class (the largest such witness).
inline std::optional<bisim_witness> n_bisimilar(const pointed_model& p, const pointed_model& q,
                                                int n)
{
    if (n < 0)
        throw std::invalid_argument("bisimulation depth must be non-negative");
    detail::require_same_signature(p, q);
    auto rounds = detail::refine(detail::frame_view::of(p.model(), q.model()), n);
    const auto offset = static_cast<kripke_model::index>(p.model().size());
    if (rounds[n][p.point()] != rounds[n][offset + q.point()])
        return std::nullopt;

    bisim_witness w{p, q, n, {}};
    for (int i = 0; i <= n; ++i) {
        auto& z = w.layers.emplace_back();
        for (kripke_model::index a = 0; a < p.model().size(); ++a)
            for (kripke_model::index b = 0; b < q.model().size(); ++b)
                if (rounds[i][a] == rounds[i][offset + b])
                    z.emplace_back(a, b);
    }
    return w;
}

/// Quotient of the part of p reachable from its point under ~depth
/// (depth = nullopt: full bisimilarity). Worlds are named "c<id>" after the
/// structural class ids, so quotients of structurally different but
/// equivalent models coincide.
inline pointed_model quotient(const pointed_model& p, std::optional<int> depth)
{
    const auto& m = p.model();
    std::vector<kripke_model::index> reach{p.point()};
    std::vector<bool> seen(m.size());
    seen[p.point()] = true;
    for (std::size_t i = 0; i < reach.size(); ++i)
        for (auto v : m.successors(reach[i]))
            if (!seen[v]) {
                seen[v] = true;
                reach.push_back(v);
            }
    std::sort(reach.begin(), reach.end());

    detail::frame_view sub;
    for (auto w : reach) {
        sub.labels.push_back(m.label(w));
        std::vector<std::uint32_t> s;
        for (auto v : m.successors(w))
            s.push_back(static_cast<std::uint32_t>(
                std::lower_bound(reach.begin(), reach.end(), v) - reach.begin()));
        sub.succ.push_back(std::move(s));
    }
    auto rounds = detail::refine(sub, depth);
    const auto& cls = rounds.back();
    auto name = [](std::uint32_t c) { return "c" + std::to_string(c); };

    std::set<world_id> worlds;
    std::set<std::pair<world_id, world_id>> edges;
    std::map<std::string, std::vector<world_id>> valuation;
    for (const auto& prop : m.props())
        valuation[prop];
    std::set<std::uint32_t> labelled;
    for (std::size_t i = 0; i < reach.size(); ++i) {
        worlds.insert(name(cls[i]));
        for (auto j : sub.succ[i])
            edges.emplace(name(cls[i]), name(cls[j]));
        if (labelled.insert(cls[i]).second)
            for (std::size_t b = 0; b < m.props().size(); ++b)
                if ((sub.labels[i] >> b) & 1U)
                    valuation[m.props()[b]].push_back(name(cls[i]));
    }
    const auto point = static_cast<std::size_t>(
        std::lower_bound(reach.begin(), reach.end(), p.point()) - reach.begin());
    auto model = make_model({worlds.begin(), worlds.end()}, {edges.begin(), edges.end()}, valuation);
    return pointed_model(model, name(cls[point]));
}

/// Membership in 𝒜ₙ: every two successors of the point are n-bisimilar.
inline bool in_class_A(const pointed_model& p, int n)
{
    const auto& succ = p.model().successors(p.point());
    if (succ.size() < 2)
        return true;
    auto rounds = detail::refine(detail::frame_view::of(p.model()), n);
    for (auto v : succ)
        if (rounds[n][v] != rounds[n][succ.front()])
            return false;
    return true;
}

/// Hash-consed bisimulation types, level by level. A type at depth d is
/// (label, set of depth d-1 types of the successors); two worlds share a
/// depth-d type iff they are d-bisimilar. Ids are only meaningful per depth
/// and per table. Thread-safe.
class type_table {
public:
    using id = std::uint32_t;

    struct entry {
        std::uint64_t label;
        std::vector<id> successors; // sorted, depth - 1 ids
    };

    id intern(int depth, std::uint64_t label, std::vector<id> successors)
    {
        std::lock_guard lock(mutex_);
        return intern_locked(depth, label, std::move(successors));
    }

    /// Entries are never modified once interned, so the reference stays valid.
    const entry& at(int depth, id t) const
    {
        std::lock_guard lock(mutex_);
        return levels_.at(depth).entries.at(t);
    }

    std::uint64_t label(int depth, id t) const
    {
        std::lock_guard lock(mutex_);
        return levels_.at(depth).entries.at(t).label;
    }

    /// Depth-`depth` type of every world of `m`.
    std::vector<id> types(const std::shared_ptr<const kripke_model>& m, int depth)
    {
        std::lock_guard lock(mutex_);
        auto key = std::pair{m.get(), depth};
        if (auto it = cache_.find(key); it != cache_.end())
            return it->second.second;
        std::vector<id> cur(m->size());
        for (kripke_model::index w = 0; w < m->size(); ++w)
            cur[w] = intern_locked(0, m->label(w), {});
        for (int d = 1; d <= depth; ++d) {
            std::vector<id> next(m->size());
            for (kripke_model::index w = 0; w < m->size(); ++w) {
                std::vector<id> s;
                for (auto v : m->successors(w))
                    s.push_back(cur[v]);
                next[w] = intern_locked(d, m->label(w), std::move(s));
            }
            cur = std::move(next);
        }
        cache_.emplace(key, std::pair{m, cur});
        return cur;
    }

    id type_of(const pointed_model& p, int depth) { return types(p.shared_model(), depth)[p.point()]; }

    /// The depth-`to` type of any world whose depth-`from` type is t.
    id truncate(int from, id t, int to)
    {
        std::lock_guard lock(mutex_);
        return truncate_locked(from, t, to);
    }

    std::size_t size(int depth) const
    {
        std::lock_guard lock(mutex_);
        return depth < static_cast<int>(levels_.size()) ? levels_[depth].entries.size() : 0;
    }

private:
    struct key_hash {
        std::size_t operator()(const std::pair<std::uint64_t, std::vector<id>>& k) const
        {
            std::size_t h = std::hash<std::uint64_t>{}(k.first);
            for (auto x : k.second)
                h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        }
    };

    struct level {
        std::deque<entry> entries;
        std::unordered_map<std::pair<std::uint64_t, std::vector<id>>, id, key_hash> index;
        std::unordered_map<std::uint64_t, id> truncations; // (from id, to) packed
    };

    id intern_locked(int depth, std::uint64_t label, std::vector<id> successors)
    {
        if (depth == 0)
            successors.clear();
        std::sort(successors.begin(), successors.end());
        successors.erase(std::unique(successors.begin(), successors.end()), successors.end());
        while (static_cast<int>(levels_.size()) <= depth)
            levels_.emplace_back();
        auto& lv = levels_[depth];
        auto key = std::pair{label, successors};
        if (auto it = lv.index.find(key); it != lv.index.end())
            return it->second;
        const auto t = static_cast<id>(lv.entries.size());
        lv.entries.push_back({label, std::move(successors)});
        lv.index.emplace(std::move(key), t);
        return t;
    }

    id truncate_locked(int from, id t, int to)
    {
        if (to >= from)
            return t;
        auto packed = (static_cast<std::uint64_t>(t) << 8) | static_cast<std::uint64_t>(to);
        if (auto it = levels_[from].truncations.find(packed); it != levels_[from].truncations.end())
            return it->second;
        const auto e = levels_[from].entries.at(t);
        std::vector<id> s;
        if (to > 0)
            for (auto c : e.successors)
                s.push_back(truncate_locked(from - 1, c, to - 1));
        auto r = intern_locked(to, e.label, std::move(s));
        levels_[from].truncations.emplace(packed, r);
        return r;
    }

    mutable std::mutex mutex_;
    std::deque<level> levels_;
    std::map<std::pair<const kripke_model*, int>,
             std::pair<std::shared_ptr<const kripke_model>, std::vector<id>>>
        cache_;
};

} // namespace mlgame
