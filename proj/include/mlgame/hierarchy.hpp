#pragma once

#include "kripke.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlgame {

using big_int = boost::multiprecision::cpp_int;

class hierarchy_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A hereditarily finite set, stored as its Ackermann code: the code of a set
/// is the sum of 2^code(x) over its members. Codes are unique per set, so
/// equality and ordering are extensional. Covers every set of rank ≤ 5.
class hf_set {
public:
    hf_set() = default;
    explicit hf_set(std::uint64_t code) : code_(code) {}

    static hf_set from_members(const std::vector<hf_set>& members)
    {
        std::uint64_t code = 0;
        for (const auto& m : members) {
            if (m.code_ >= 64)
                throw hierarchy_error("set rank too large for the encoding");
            code |= std::uint64_t{1} << m.code_;
        }
        return hf_set(code);
    }

    std::uint64_t code() const { return code_; }
    bool empty() const { return code_ == 0; }
    std::size_t size() const { return static_cast<std::size_t>(std::popcount(code_)); }

    bool contains(const hf_set& x) const { return x.code_ < 64 && ((code_ >> x.code_) & 1U); }

    /// Members in ascending code order.
    std::vector<hf_set> members() const
    {
        std::vector<hf_set> out;
        for (std::uint64_t c = code_; c != 0; c &= c - 1)
            out.emplace_back(static_cast<std::uint64_t>(std::countr_zero(c)));
        return out;
    }

    /// Nested braces, members in code order: ∅ = "{}", {∅, {∅}} = "{{},{{}}}".
    std::string to_string() const
    {
        std::string out = "{";
        bool first = true;
        for (const auto& m : members()) {
            if (!first)
                out += ',';
            first = false;
            out += m.to_string();
        }
        return out + "}";
    }

    /// Inverse of to_string; also accepts members in any order and repeated
    /// members, and ignores whitespace.
    static hf_set parse(std::string_view text)
    {
        std::size_t pos = 0;
        auto skip = [&] {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
                ++pos;
        };
        auto fail = [&](const char* what) -> hf_set {
            throw hierarchy_error(std::string("bad set literal '") + std::string(text) + "': " + what);
        };
        auto go = [&](auto&& self) -> hf_set {
            skip();
            if (pos >= text.size() || text[pos] != '{')
                return fail("expected '{'");
            ++pos;
            std::vector<hf_set> members;
            skip();
            if (pos < text.size() && text[pos] == '}') {
                ++pos;
                return hf_set();
            }
            while (true) {
                members.push_back(self(self));
                skip();
                if (pos < text.size() && text[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (pos < text.size() && text[pos] == '}') {
                    ++pos;
                    return from_members(members);
                }
                return fail("expected ',' or '}'");
            }
        };
        auto s = go(go);
        skip();
        if (pos != text.size())
            fail("trailing characters");
        return s;
    }

    friend auto operator<=>(const hf_set&, const hf_set&) = default;

private:
    std::uint64_t code_ = 0;
};

/// tower(0) = 1, tower(n+1) = 2^tower(n).
inline big_int tower(int n)
{
    if (n < 0)
        throw std::invalid_argument("tower: n must be non-negative");
    big_int t = 1;
    for (int i = 0; i < n; ++i) {
        if (t > 1'000'000)
            throw std::overflow_error("tower: value too large to represent");
        big_int next = 1;
        next <<= static_cast<unsigned>(t);
        t = std::move(next);
    }
    return t;
}

/// Vₙ with V₀ = ∅ and V_{n+1} = 𝒫(Vₙ). Vₙ consists of exactly the sets with
/// code below tower(n-1), so |Vₙ| = tower(n-1). Levels above 4 are refused
/// unless allow_large (which permits n = 5, 65536 sets).
inline std::vector<hf_set> v_level(int n, bool allow_large = false)
{
    if (n < 0)
        throw hierarchy_error("level must be non-negative");
    if (n > 5 || (n == 5 && !allow_large))
        throw hierarchy_error("level " + std::to_string(n) +
                              " is too large to enumerate" +
                              (n == 5 ? " (pass the large-level override to allow V5)" : ""));
    if (n == 0)
        return {};
    const auto count = static_cast<std::uint64_t>(tower(n - 1));
    std::vector<hf_set> out;
    out.reserve(count);
    for (std::uint64_t c = 0; c < count; ++c)
        out.emplace_back(c);
    return out;
}

/// (M_a, a): a and its transitive closure, with x → y iff y ∈ x, Φ = ∅.
/// Worlds are named by their nested-brace strings.
inline pointed_model model_of(const hf_set& a)
{
    std::set<hf_set> seen{a};
    std::vector<hf_set> stack{a};
    std::vector<std::pair<world_id, world_id>> edges;
    while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        for (const auto& y : x.members()) {
            edges.emplace_back(x.to_string(), y.to_string());
            if (seen.insert(y).second)
                stack.push_back(y);
        }
    }
    std::vector<world_id> worlds;
    for (const auto& x : seen)
        worlds.push_back(x.to_string());
    return pointed_model(make_model(std::move(worlds), edges), a.to_string());
}

/// 𝕍ₙ = {⊎{(M_a, a)} : a ∈ V_{n+1}}, n ≤ 4.
inline model_set vv_set(int n)
{
    if (n < 0 || n > 4)
        throw hierarchy_error("vv_set: n must be in 0..4");
    std::vector<pointed_model> out;
    for (const auto& a : v_level(n + 1, true))
        out.push_back(join({model_of(a)}));
    return model_set(std::move(out));
}

/// 𝔼ₙ = {⊎{(M_a, a), (M_b, b)} : a ≠ b ∈ V_{n+1}}, unordered pairs, n ≤ 3.
inline model_set ee_set(int n)
{
    if (n < 0 || n > 3)
        throw hierarchy_error("ee_set: n must be in 0..3");
    const auto level = v_level(n + 1);
    std::vector<pointed_model> models;
    for (const auto& a : level)
        models.push_back(model_of(a));
    std::vector<pointed_model> out;
    for (std::size_t i = 0; i < level.size(); ++i)
        for (std::size_t j = i + 1; j < level.size(); ++j)
            out.push_back(join({models[i], models[j]}));
    return model_set(std::move(out));
}

} // namespace mlgame
