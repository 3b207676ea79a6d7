#pragma once

#include "bisim.hpp"
#include "game.hpp"
#include "strategy.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

namespace mlgame {

struct solve_options {
    /// Ceiling on memoized positions; exceeding it aborts with budget_exceeded.
    std::size_t node_limit = 10'000'000;
    /// Worker threads for the root position's candidate moves. Verdicts and
    /// strategies do not depend on it; node counts may.
    unsigned threads = 1;
};

class budget_exceeded : public std::runtime_error {
public:
    explicit budget_exceeded(std::size_t limit)
        : std::runtime_error("solver node limit of " + std::to_string(limit) + " exceeded")
    {
    }
};

enum class winner : std::uint8_t { spoiler, duplicator };

struct verdict {
    winner who = winner::duplicator;
    std::optional<spoiler_strategy> strategy; // set iff who == spoiler
    std::size_t nodes = 0;
};

/// Exact solver for EF_{m,k}(𝒜, ℬ) by memoized exhaustive search.
///
/// Search runs on bisimulation types instead of models: a position at modal
/// budget m only depends on the depth-m types of its members (a formula with
/// ms ≤ m has modal depth ≤ m), so each side becomes a sorted set of type ids.
/// On top of that:
///  - a type on both sides is a D win (the two members are m-bisimilar);
///  - splits are proper partitions (covers and trivial splits are dominated);
///  - successor moves only pick minimal hitting sets of the members'
///    successor-type sets (a smaller image is never worse for S).
///
/// One solver may be reused across positions; the memo carries over.
class game_solver {
public:
    explicit game_solver(solve_options opts = {}) : opts_(opts) {}

    verdict solve(const game_position& pos)
    {
        if (pos.m < 0 || pos.k < 0)
            throw game_error("budgets must be non-negative");
        common_signature(pos.left, pos.right);
        const auto left = types_of(pos.left, pos.m);
        const auto right = types_of(pos.right, pos.m);
        bool won = opts_.threads > 1 ? win_parallel(pos.m, pos.k, left, right)
                                     : win(pos.m, pos.k, left, right);
        verdict v;
        v.nodes = nodes();
        if (won) {
            v.who = winner::spoiler;
            v.strategy = build_strategy(pos);
        }
        return v;
    }

    std::size_t nodes() const
    {
        std::lock_guard lock(memo_mutex_);
        return memo_.size();
    }

private:
    using tid = type_table::id;
    using tset = std::vector<tid>;

    enum class move_kind : std::uint8_t { left_succ, right_succ, left_split, right_split };

    /// For splits `set` is part 1 (depth-m ids); for successor moves it is
    /// the chosen image (depth m-1 ids).
    struct tmove {
        move_kind kind = move_kind::left_succ;
        int m1 = 0, k1 = 0;
        tset set;
    };

    struct key {
        int m, k;
        tset left, right;
        bool operator==(const key&) const = default;
    };

    struct key_hash {
        std::size_t operator()(const key& k) const
        {
            std::size_t h = static_cast<std::size_t>(k.m) * 1315423911u + static_cast<std::size_t>(k.k);
            auto mix = [&](std::size_t x) { h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
            for (auto t : k.left)
                mix(t);
            mix(0xffffffffu);
            for (auto t : k.right)
                mix(t);
            return h;
        }
    };

    struct entry {
        bool win = false;
        tmove mv;
    };

    static bool intersects(const tset& a, const tset& b)
    {
        auto i = a.begin();
        auto j = b.begin();
        while (i != a.end() && j != b.end()) {
            if (*i < *j)
                ++i;
            else if (*j < *i)
                ++j;
            else
                return true;
        }
        return false;
    }

    static void normalize(tset& s)
    {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }

    tset types_of(const model_set& s, int depth)
    {
        tset out;
        for (const auto& p : s)
            out.push_back(table_.type_of(p, depth));
        normalize(out);
        return out;
    }

    /// Some literal (⊥, ⊤, p, ¬p) separates.
    bool literal_separates(int m, const tset& l, const tset& r) const
    {
        if (l.empty() || r.empty())
            return true;
        std::uint64_t and_l = ~0ULL, or_l = 0, and_r = ~0ULL, or_r = 0;
        for (auto t : l) {
            auto lab = table_.label(m, t);
            and_l &= lab;
            or_l |= lab;
        }
        for (auto t : r) {
            auto lab = table_.label(m, t);
            and_r &= lab;
            or_r |= lab;
        }
        return ((and_l & ~or_r) | (and_r & ~or_l)) != 0;
    }

    tset truncate(const tset& s, int from, int to)
    {
        tset out;
        for (auto t : s)
            out.push_back(table_.truncate(from, t, to));
        normalize(out);
        return out;
    }

    tset all_successors(const tset& s, int m)
    {
        tset out;
        for (auto t : s) {
            const auto& e = table_.at(m, t);
            out.insert(out.end(), e.successors.begin(), e.successors.end());
        }
        normalize(out);
        return out;
    }

    /// Inclusion-minimal sets hitting every member's successor-type set,
    /// smallest first. Empty if some member has no successor.
    std::vector<tset> minimal_images(const tset& s, int m)
    {
        std::vector<const tset*> families;
        for (auto t : s) {
            const auto& e = table_.at(m, t);
            if (e.successors.empty())
                return {};
            families.push_back(&e.successors);
        }
        std::vector<tset> found;
        tset current;
        auto go = [&](auto&& self, std::size_t i) -> void {
            if (i == families.size()) {
                auto c = current;
                normalize(c);
                found.push_back(std::move(c));
                return;
            }
            const auto& fam = *families[i];
            if (intersects_unsorted(current, fam)) {
                self(self, i + 1);
                return;
            }
            for (auto x : fam) {
                current.push_back(x);
                self(self, i + 1);
                current.pop_back();
            }
        };
        go(go, 0);

        normalize_sets(found);
        std::vector<tset> minimal;
        for (const auto& h : found) {
            bool is_min = true;
            for (std::size_t drop = 0; drop < h.size() && is_min; ++drop) {
                bool still_hits = true;
                for (const auto* fam : families) {
                    bool hit = false;
                    for (std::size_t j = 0; j < h.size() && !hit; ++j)
                        hit = j != drop && std::binary_search(fam->begin(), fam->end(), h[j]);
                    if (!hit) {
                        still_hits = false;
                        break;
                    }
                }
                if (still_hits)
                    is_min = false;
            }
            if (is_min)
                minimal.push_back(h);
        }
        std::stable_sort(minimal.begin(), minimal.end(),
                         [](const tset& a, const tset& b) { return a.size() < b.size(); });
        return minimal;
    }

    static bool intersects_unsorted(const tset& current, const tset& sorted)
    {
        for (auto x : current)
            if (std::binary_search(sorted.begin(), sorted.end(), x))
                return true;
        return false;
    }

    static void normalize_sets(std::vector<tset>& sets)
    {
        std::sort(sets.begin(), sets.end());
        sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    }

    /// S's candidate moves in search order: successor moves, then splits.
    std::vector<tmove> candidates(int m, int k, const tset& l, const tset& r)
    {
        std::vector<tmove> out;
        if (m >= 1) {
            for (auto& x : minimal_images(l, m))
                out.push_back({move_kind::left_succ, 0, 0, std::move(x)});
            for (auto& y : minimal_images(r, m))
                out.push_back({move_kind::right_succ, 0, 0, std::move(y)});
        }
        if (k >= 1) {
            for (auto kind : {move_kind::left_split, move_kind::right_split}) {
                const auto& s = kind == move_kind::left_split ? l : r;
                if (s.size() < 2)
                    continue;
                if (s.size() > 24)
                    throw game_error("split side too large for exhaustive search");
                const auto n = s.size();
                for (std::uint32_t mask = 1; mask < (1U << (n - 1)); ++mask) {
                    tset part1{s[0]};
                    for (std::size_t i = 1; i < n; ++i)
                        if (!((mask >> (i - 1)) & 1U))
                            part1.push_back(s[i]);
                    for (int k1 = 0; k1 < k; ++k1)
                        for (int m1 = 0; m1 <= m; ++m1)
                            out.push_back({kind, m1, k1, part1});
                }
            }
        }
        return out;
    }

    bool try_move(int m, int k, const tset& l, const tset& r, const tmove& mv)
    {
        switch (mv.kind) {
        case move_kind::left_succ:
            return win(m - 1, k, mv.set, all_successors(r, m));
        case move_kind::right_succ:
            return win(m - 1, k, all_successors(l, m), mv.set);
        case move_kind::left_split:
        case move_kind::right_split: {
            const bool left = mv.kind == move_kind::left_split;
            const auto& whole = left ? l : r;
            const auto& other = left ? r : l;
            tset part2;
            std::set_difference(whole.begin(), whole.end(), mv.set.begin(), mv.set.end(),
                                std::back_inserter(part2));
            const int m2 = m - mv.m1, k2 = k - 1 - mv.k1;
            auto child = [&](const tset& part, int cm, int ck) {
                auto p = truncate(part, m, cm);
                auto o = truncate(other, m, cm);
                return left ? win(cm, ck, p, o) : win(cm, ck, o, p);
            };
            return child(mv.set, mv.m1, mv.k1) && child(part2, m2, k2);
        }
        }
        return false;
    }

    std::optional<entry> lookup(const key& ky) const
    {
        std::lock_guard lock(memo_mutex_);
        if (auto it = memo_.find(ky); it != memo_.end())
            return it->second;
        return std::nullopt;
    }

    void store(key ky, entry e)
    {
        std::lock_guard lock(memo_mutex_);
        if (memo_.size() >= opts_.node_limit)
            throw budget_exceeded(opts_.node_limit);
        memo_.emplace(std::move(ky), std::move(e));
    }

    bool win(int m, int k, const tset& l, const tset& r)
    {
        if (intersects(l, r))
            return false;
        if (literal_separates(m, l, r))
            return true;
        if (m == 0 && k == 0)
            return false;
        key ky{m, k, l, r};
        if (auto e = lookup(ky))
            return e->win;
        entry result;
        for (auto& mv : candidates(m, k, l, r))
            if (try_move(m, k, l, r, mv)) {
                result = {true, std::move(mv)};
                break;
            }
        const bool w = result.win;
        store(std::move(ky), std::move(result));
        return w;
    }

    /// Root-level parallel search; picks the first winning candidate in the
    /// sequential order so the strategy matches the single-threaded one.
    bool win_parallel(int m, int k, const tset& l, const tset& r)
    {
        if (intersects(l, r))
            return false;
        if (literal_separates(m, l, r))
            return true;
        if (m == 0 && k == 0)
            return false;
        key ky{m, k, l, r};
        if (auto e = lookup(ky))
            return e->win;

        auto cands = candidates(m, k, l, r);
        std::vector<char> wins(cands.size(), 0);
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> best{cands.size()};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < cands.size();) {
                    if (i > best.load())
                        break;
                    if (try_move(m, k, l, r, cands[i])) {
                        wins[i] = 1;
                        auto b = best.load();
                        while (i < b && !best.compare_exchange_weak(b, i)) {
                        }
                    }
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        };
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < opts_.threads; ++t)
                pool.emplace_back(worker);
        }
        if (failure)
            std::rethrow_exception(failure);

        entry result;
        if (best.load() < cands.size())
            result = {true, cands[best.load()]};
        const bool w = result.win;
        store(std::move(ky), std::move(result));
        return w;
    }

    /// Replays the memoized type-level moves on the concrete models.
    spoiler_strategy build_strategy(const game_position& pos)
    {
        if (auto lit = separating_literal(pos.left, pos.right))
            return {*lit, {}};
        const auto l = types_of(pos.left, pos.m);
        const auto r = types_of(pos.right, pos.m);
        auto e = lookup({pos.m, pos.k, l, r});
        if (!e) {
            win(pos.m, pos.k, l, r);
            e = lookup({pos.m, pos.k, l, r});
        }
        if (!e || !e->win)
            throw std::logic_error("strategy replay reached a position S does not win");

        const auto& mv = e->mv;
        spoiler_strategy out{formula::top(), {}};
        switch (mv.kind) {
        case move_kind::left_succ:
        case move_kind::right_succ: {
            const bool left = mv.kind == move_kind::left_succ;
            successor_move sm{left ? side::left : side::right, {}};
            for (const auto& p : left ? pos.left : pos.right) {
                auto types = table_.types(p.shared_model(), pos.m - 1);
                for (auto v : p.model().successors(p.point()))
                    if (std::binary_search(mv.set.begin(), mv.set.end(), types[v])) {
                        sm.choice.push_back(p.at(v));
                        break;
                    }
            }
            out.step = move{sm};
            out.next.push_back(build_strategy(apply_move(pos, sm)));
            return out;
        }
        case move_kind::left_split:
        case move_kind::right_split: {
            const bool left = mv.kind == move_kind::left_split;
            std::vector<pointed_model> p1, p2;
            for (const auto& p : left ? pos.left : pos.right) {
                auto t = table_.type_of(p, pos.m);
                (std::binary_search(mv.set.begin(), mv.set.end(), t) ? p1 : p2).push_back(p);
            }
            split_move sp{left ? side::left : side::right, mv.m1, mv.k1, pos.m - mv.m1,
                          pos.k - 1 - mv.k1, model_set(p1), model_set(p2)};
            out.step = move{sp};
            out.next.push_back(build_strategy(apply_move(pos, sp, side::left)));
            out.next.push_back(build_strategy(apply_move(pos, sp, side::right)));
            return out;
        }
        }
        return out;
    }

    solve_options opts_;
    type_table table_;
    mutable std::mutex memo_mutex_;
    std::unordered_map<key, entry, key_hash> memo_;
};

inline verdict solve(const game_position& pos, solve_options opts = {})
{
    return game_solver(opts).solve(pos);
}

struct frontier_entry {
    int m = 0;
    int k = 0;
    formula separator = formula::top();
};

/// Every Pareto-minimal budget (m, k) with m + k <= max_total at which S wins,
/// each with a separating formula read off the solver's strategy. Sorted by
/// m + k, then m.
inline std::vector<frontier_entry> minimal_separating(const model_set& a, const model_set& b,
                                                      int max_total, solve_options opts = {})
{
    if (max_total < 0)
        throw std::invalid_argument("budget must be non-negative");
    game_solver solver(opts);
    std::map<std::pair<int, int>, bool> won;
    auto wins_at = [&](int m, int k) {
        if (m < 0 || k < 0)
            return false;
        auto it = won.find({m, k});
        return it != won.end() && it->second;
    };
    std::vector<frontier_entry> out;
    for (int total = 0; total <= max_total; ++total) {
        for (int m = total; m >= 0; --m) {
            const int k = total - m;
            if (wins_at(m - 1, k) || wins_at(m, k - 1)) {
                won[{m, k}] = true;
                continue;
            }
            auto v = solver.solve({m, k, a, b});
            won[{m, k}] = v.who == winner::spoiler;
            if (v.who == winner::spoiler)
                out.push_back({m, k, extract_formula(*v.strategy)});
        }
    }
    std::sort(out.begin(), out.end(), [](const frontier_entry& x, const frontier_entry& y) {
        return std::pair{x.m + x.k, x.m} < std::pair{y.m + y.k, y.m};
    });
    return out;
}

} // namespace mlgame
