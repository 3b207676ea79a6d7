#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mlgame {

using world_id = std::string;

class model_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A finite Kripke model (W, R, V) over a finite signature of proposition
/// symbols. Worlds are stored sorted by name; everything else is indexed by
/// position in that order. Immutable after construction.
///
/// At most 64 proposition symbols are supported (a world's label is a bitmask).
class kripke_model {
public:
    using index = std::uint32_t;

    kripke_model() = default;

    kripke_model(std::vector<world_id> worlds,
                 const std::vector<std::pair<world_id, world_id>>& edges,
                 const std::map<std::string, std::vector<world_id>>& valuation)
    {
        std::sort(worlds.begin(), worlds.end());
        if (std::adjacent_find(worlds.begin(), worlds.end()) != worlds.end())
            throw model_error("duplicate world identifier");
        worlds_ = std::move(worlds);

        succ_.assign(worlds_.size(), {});
        for (const auto& [from, to] : edges)
            succ_[require(from)].push_back(require(to));
        for (auto& s : succ_) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
        }

        if (valuation.size() > 64)
            throw model_error("at most 64 proposition symbols are supported");
        labels_.assign(worlds_.size(), 0);
        for (const auto& [prop, members] : valuation) {
            const auto bit = std::uint64_t{1} << props_.size();
            props_.push_back(prop);
            for (const auto& w : members)
                labels_[require(w)] |= bit;
        }
    }

    std::size_t size() const { return worlds_.size(); }
    const std::vector<world_id>& worlds() const { return worlds_; }
    const world_id& name(index w) const { return worlds_.at(w); }

    std::optional<index> find(std::string_view w) const
    {
        auto it = std::lower_bound(worlds_.begin(), worlds_.end(), w);
        if (it == worlds_.end() || *it != w)
            return std::nullopt;
        return static_cast<index>(it - worlds_.begin());
    }

    const std::vector<index>& successors(index w) const { return succ_.at(w); }

    /// Sorted proposition signature.
    const std::vector<std::string>& props() const { return props_; }

    std::optional<std::size_t> prop_index(std::string_view p) const
    {
        auto it = std::lower_bound(props_.begin(), props_.end(), p);
        if (it == props_.end() || *it != p)
            return std::nullopt;
        return static_cast<std::size_t>(it - props_.begin());
    }

    /// Bit i set iff props()[i] holds at w.
    std::uint64_t label(index w) const { return labels_.at(w); }

    bool holds(std::size_t prop, index w) const { return (labels_.at(w) >> prop) & 1U; }

    std::vector<std::pair<world_id, world_id>> edge_list() const
    {
        std::vector<std::pair<world_id, world_id>> out;
        for (index w = 0; w < size(); ++w)
            for (index v : succ_[w])
                out.emplace_back(worlds_[w], worlds_[v]);
        return out;
    }

    std::size_t edge_count() const
    {
        std::size_t n = 0;
        for (const auto& s : succ_)
            n += s.size();
        return n;
    }

    std::map<std::string, std::vector<world_id>> valuation() const
    {
        std::map<std::string, std::vector<world_id>> out;
        for (std::size_t p = 0; p < props_.size(); ++p) {
            auto& members = out[props_[p]];
            for (index w = 0; w < size(); ++w)
                if (holds(p, w))
                    members.push_back(worlds_[w]);
        }
        return out;
    }

    friend auto operator<=>(const kripke_model&, const kripke_model&) = default;
    friend bool operator==(const kripke_model&, const kripke_model&) = default;

private:
    index require(std::string_view w) const
    {
        if (auto i = find(w))
            return *i;
        throw model_error("unknown world '" + std::string(w) + "'");
    }

    std::vector<world_id> worlds_;
    std::vector<std::vector<index>> succ_;
    std::vector<std::string> props_;
    std::vector<std::uint64_t> labels_;
};

/// (M, w). Pointed models produced from one another (successors, choice maps)
/// share the underlying model.
class pointed_model {
public:
    using index = kripke_model::index;

    pointed_model(std::shared_ptr<const kripke_model> model, index point)
        : model_(std::move(model)), point_(point)
    {
        if (!model_ || point_ >= model_->size())
            throw model_error("point is not a world of the model");
    }

    pointed_model(std::shared_ptr<const kripke_model> model, std::string_view point)
        : model_(std::move(model))
    {
        if (!model_)
            throw model_error("null model");
        auto i = model_->find(point);
        if (!i)
            throw model_error("point '" + std::string(point) + "' is not a world of the model");
        point_ = *i;
    }

    const kripke_model& model() const { return *model_; }
    const std::shared_ptr<const kripke_model>& shared_model() const { return model_; }
    index point() const { return point_; }
    const world_id& point_name() const { return model_->name(point_); }

    pointed_model at(index w) const { return {model_, w}; }

    bool has_successor() const { return !model_->successors(point_).empty(); }

    friend std::strong_ordering operator<=>(const pointed_model& a, const pointed_model& b)
    {
        if (a.model_ != b.model_) {
            if (auto c = *a.model_ <=> *b.model_; c != 0)
                return c;
        }
        return a.point_ <=> b.point_;
    }

    friend bool operator==(const pointed_model& a, const pointed_model& b)
    {
        return (a <=> b) == 0;
    }

private:
    std::shared_ptr<const kripke_model> model_;
    index point_ = 0;
};

/// A finite set of pointed models, deduplicated by structural identity and
/// kept in sorted order.
class model_set {
public:
    using value_type = pointed_model;
    using const_iterator = std::vector<pointed_model>::const_iterator;

    model_set() = default;

    model_set(std::vector<pointed_model> members) : members_(std::move(members))
    {
        std::sort(members_.begin(), members_.end());
        members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    }

    model_set(std::initializer_list<pointed_model> members)
        : model_set(std::vector<pointed_model>(members))
    {
    }

    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const_iterator begin() const { return members_.begin(); }
    const_iterator end() const { return members_.end(); }
    const pointed_model& operator[](std::size_t i) const { return members_[i]; }
    const std::vector<pointed_model>& members() const { return members_; }

    bool contains(const pointed_model& p) const
    {
        return std::binary_search(members_.begin(), members_.end(), p);
    }

    std::optional<std::size_t> position(const pointed_model& p) const
    {
        auto it = std::lower_bound(members_.begin(), members_.end(), p);
        if (it == members_.end() || *it != p)
            return std::nullopt;
        return static_cast<std::size_t>(it - members_.begin());
    }

    bool is_subset_of(const model_set& other) const
    {
        return std::includes(other.begin(), other.end(), begin(), end());
    }

    friend model_set set_union(const model_set& a, const model_set& b)
    {
        std::vector<pointed_model> out;
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
        return model_set(std::move(out));
    }

    friend bool operator==(const model_set&, const model_set&) = default;

private:
    std::vector<pointed_model> members_;
};

inline std::shared_ptr<const kripke_model> make_model(
    std::vector<world_id> worlds,
    const std::vector<std::pair<world_id, world_id>>& edges,
    const std::map<std::string, std::vector<world_id>>& valuation = {})
{
    return std::make_shared<const kripke_model>(std::move(worlds), edges, valuation);
}

/// ⟨M, w⟩: the successor-pointed models of p, sharing p's model.
inline model_set successors(const pointed_model& p)
{
    std::vector<pointed_model> out;
    for (auto v : p.model().successors(p.point()))
        out.push_back(p.at(v));
    return model_set(std::move(out));
}

/// ◇𝒜: all successors of all members.
inline model_set diamond_all(const model_set& s)
{
    std::vector<pointed_model> out;
    for (const auto& p : s)
        for (auto v : p.model().successors(p.point()))
            out.push_back(p.at(v));
    return model_set(std::move(out));
}

inline bool is_successor(const pointed_model& p, const pointed_model& q)
{
    if (p.shared_model() != q.shared_model() && !(p.model() == q.model()))
        return false;
    const auto& s = p.model().successors(p.point());
    return std::binary_search(s.begin(), s.end(), q.point());
}

/// ◇_f 𝒜 = f(𝒜), with `choice[i]` the image of the i-th member of s.
inline model_set diamond_choice(const model_set& s, const std::vector<pointed_model>& choice)
{
    if (choice.size() != s.size())
        throw model_error("choice map is not total on the set");
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!is_successor(s[i], choice[i]))
            throw model_error("choice map leaves the successor set of a member");
    return model_set(choice);
}

/// ◇_f 𝒜 for a choice map given as an explicit function table.
inline model_set diamond_choice(const model_set& s,
                                const std::map<pointed_model, pointed_model>& f)
{
    std::vector<pointed_model> choice;
    for (const auto& p : s) {
        auto it = f.find(p);
        if (it == f.end())
            throw model_error("choice map is not total on the set");
        choice.push_back(it->second);
    }
    return diamond_choice(s, choice);
}

namespace detail {

inline world_id fresh_world(const std::set<world_id>& taken)
{
    world_id root = "_root";
    for (int i = 1; taken.contains(root); ++i)
        root = "_root" + std::to_string(i);
    return root;
}

} // namespace detail

/// ⊎𝒜: a fresh root with an edge to the point of every member, over the
/// union of the members' domains. Members must agree on the successors and
/// labels of every shared world, and share one signature.
inline pointed_model join(const model_set& models)
{
    std::set<world_id> worlds;
    std::map<world_id, std::set<world_id>> succ;
    std::map<world_id, std::set<std::string>> labels;
    std::optional<std::vector<std::string>> signature;

    for (const auto& p : models) {
        const auto& m = p.model();
        if (signature && *signature != m.props())
            throw model_error("join: members have different signatures");
        signature = m.props();
        for (kripke_model::index w = 0; w < m.size(); ++w) {
            std::set<world_id> s;
            for (auto v : m.successors(w))
                s.insert(m.name(v));
            std::set<std::string> l;
            for (std::size_t i = 0; i < m.props().size(); ++i)
                if (m.holds(i, w))
                    l.insert(m.props()[i]);
            const auto& name = m.name(w);
            if (auto [it, fresh] = succ.emplace(name, s); !fresh && it->second != s)
                throw model_error("join: edge conflict at shared world '" + name + "'");
            if (auto [it, fresh] = labels.emplace(name, l); !fresh && it->second != l)
                throw model_error("join: valuation conflict at shared world '" + name + "'");
            worlds.insert(name);
        }
    }

    const auto root = detail::fresh_world(worlds);
    std::vector<std::pair<world_id, world_id>> edges;
    for (const auto& p : models)
        edges.emplace_back(root, p.point_name());
    for (const auto& [w, s] : succ)
        for (const auto& v : s)
            edges.emplace_back(w, v);

    std::map<std::string, std::vector<world_id>> valuation;
    for (const auto& prop : signature.value_or(std::vector<std::string>{}))
        valuation[prop];
    for (const auto& [w, l] : labels)
        for (const auto& prop : l)
            valuation[prop].push_back(w);

    std::vector<world_id> all(worlds.begin(), worlds.end());
    all.push_back(root);
    auto model = make_model(std::move(all), edges, valuation);
    return pointed_model(model, root);
}

/// The common signature of every member of the given sets; throws if they
/// disagree. Empty sets contribute nothing.
template <class... Sets>
std::vector<std::string> common_signature(const Sets&... sets)
{
    std::optional<std::vector<std::string>> sig;
    auto visit = [&](const model_set& s) {
        for (const auto& p : s) {
            if (sig && *sig != p.model().props())
                throw model_error("pointed models have different signatures");
            sig = p.model().props();
        }
    };
    (visit(sets), ...);
    return sig.value_or(std::vector<std::string>{});
}

} // namespace mlgame
