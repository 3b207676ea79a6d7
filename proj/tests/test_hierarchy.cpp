#include "mlgame/bisim.hpp"
#include "mlgame/hierarchy.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mlgame;

TEST(Tower, SmallValues)
{
    EXPECT_EQ(tower(0), 1);
    EXPECT_EQ(tower(1), 2);
    EXPECT_EQ(tower(2), 4);
    EXPECT_EQ(tower(3), 16);
    EXPECT_EQ(tower(4), 65536);
    // tower(5) = 2^65536: a one followed by 65536 zero bits
    auto t5 = tower(5);
    EXPECT_EQ(boost::multiprecision::msb(t5), 65536u);
    EXPECT_EQ(boost::multiprecision::lsb(t5), 65536u);
    EXPECT_THROW(tower(-1), std::invalid_argument);
}

TEST(HfSet, PrintAndParse)
{
    EXPECT_EQ(hf_set(0).to_string(), "{}");
    EXPECT_EQ(hf_set(1).to_string(), "{{}}");
    EXPECT_EQ(hf_set(3).to_string(), "{{},{{}}}");
    EXPECT_EQ(hf_set::parse("{{{}},{}}"), hf_set(3));
    EXPECT_EQ(hf_set::parse(" { {} , {} } "), hf_set(1));
    for (const auto& a : v_level(4))
        EXPECT_EQ(hf_set::parse(a.to_string()), a);
    for (const char* bad : {"", "{", "{}}", "{,}", "{{}", "x"})
        EXPECT_THROW(hf_set::parse(bad), hierarchy_error) << bad;
}

TEST(HfSet, MembersAreExtensional)
{
    auto a = hf_set::from_members({hf_set(0), hf_set(1)});
    EXPECT_EQ(a, hf_set(3));
    EXPECT_EQ(a.size(), 2u);
    EXPECT_TRUE(a.contains(hf_set(0)));
    EXPECT_FALSE(a.contains(hf_set(2)));
    EXPECT_EQ(a.members(), (std::vector<hf_set>{hf_set(0), hf_set(1)}));
}

TEST(VLevel, Contents)
{
    EXPECT_TRUE(v_level(0).empty());
    EXPECT_EQ(v_level(1), std::vector<hf_set>{hf_set(0)});
    auto v2 = v_level(2);
    ASSERT_EQ(v2.size(), 2u);
    EXPECT_EQ(v2[0].to_string(), "{}");
    EXPECT_EQ(v2[1].to_string(), "{{}}");
}

TEST(VLevel, IsThePowersetOfThePreviousLevel)
{
    for (int n = 1; n <= 4; ++n) {
        auto prev = v_level(n - 1);
        std::set<hf_set> expect;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << prev.size()); ++mask) {
            std::vector<hf_set> members;
            for (std::size_t i = 0; i < prev.size(); ++i)
                if ((mask >> i) & 1U)
                    members.push_back(prev[i]);
            expect.insert(hf_set::from_members(members));
        }
        auto level = v_level(n);
        EXPECT_EQ(std::set<hf_set>(level.begin(), level.end()), expect);
        EXPECT_EQ(level.size(), static_cast<std::size_t>(tower(n - 1)));
    }
}

TEST(VLevel, LargeLevelsAreGuarded)
{
    EXPECT_THROW(v_level(5), hierarchy_error);
    EXPECT_EQ(v_level(5, true).size(), 65536u);
    EXPECT_THROW(v_level(6, true), hierarchy_error);
}

TEST(ModelOf, Examples)
{
    auto e = model_of(hf_set(0));
    EXPECT_EQ(e.model().size(), 1u);
    EXPECT_EQ(e.model().edge_count(), 0u);

    auto s = model_of(hf_set(1));
    EXPECT_EQ(s.model().size(), 2u);
    EXPECT_EQ(s.model().edge_count(), 1u);

    auto two = model_of(hf_set::parse("{{},{{}}}"));
    EXPECT_EQ(two.model().size(), 3u);
    EXPECT_EQ(two.model().edge_count(), 3u);
    EXPECT_EQ(two.point_name(), "{{},{{}}}");
    EXPECT_EQ(successors(two).size(), 2u);
    EXPECT_TRUE(two.model().props().empty());
}

TEST(Families, Sizes)
{
    EXPECT_EQ(vv_set(1).size(), 2u);
    EXPECT_EQ(vv_set(2).size(), 4u);
    EXPECT_EQ(vv_set(3).size(), 16u);
    EXPECT_EQ(ee_set(1).size(), 1u);
    EXPECT_EQ(ee_set(2).size(), 6u);
    EXPECT_EQ(ee_set(3).size(), 120u);
    auto e1 = ee_set(1)[0];
    EXPECT_EQ(e1.model().size(), 3u);
    EXPECT_EQ(e1.model().edge_count(), 3u);
    EXPECT_THROW(vv_set(5), hierarchy_error);
    EXPECT_THROW(ee_set(4), hierarchy_error);
}

TEST(Families, DistinctSetsAreNotBisimilar)
{
    // a ≠ b in V_{n+1} ⇒ (M_a, a) and (M_b, b) are not n-bisimilar
    for (int n = 0; n <= 3; ++n) {
        auto level = v_level(n + 1);
        for (std::size_t i = 0; i < level.size(); ++i)
            for (std::size_t j = i + 1; j < level.size(); ++j) {
                auto a = model_of(level[i]), b = model_of(level[j]);
                EXPECT_FALSE(are_n_bisimilar(a, b, n));
                if (n <= 2) {
                    EXPECT_FALSE(oracle::n_bisimilar(a, b, n));
                }
            }
    }
}
