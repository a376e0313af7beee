#include <gtest/gtest.h>

#include <set>

#include "ifk/identities.hpp"

using namespace ifk;

TEST(Identities, EveryCheckPasses) {
    auto all = all_identity_checks();
    std::set<int> groups;
    for (const auto& c : all) {
        groups.insert(c.group);
        EXPECT_TRUE(c.pass()) << identity_group_name(c.group) << ": " << c.name << " = " << c.value << " bound "
                              << c.bound;
    }
    EXPECT_EQ(groups, (std::set<int>{1, 2, 3, 4, 5, 6, 7, 8}));
}

TEST(Identities, EachGroupHasANegativeControlOrExactValue) {
    auto all = all_identity_checks();
    std::set<int> with_control;
    for (const auto& c : all)
        if (c.control) with_control.insert(c.group);
    for (int g : {1, 4, 5}) EXPECT_TRUE(with_control.count(g)) << identity_group_name(g);
}

TEST(Identities, PassSemantics) {
    IdentityCheck c{1, "x", 0.5, 1.0};
    EXPECT_TRUE(c.pass());
    c.control = true;
    EXPECT_FALSE(c.pass());
    c.value = 2.0;
    EXPECT_TRUE(c.pass());
    IdentityCheck info{1, "y", 5.0, 1.0, false, true};
    EXPECT_TRUE(info.pass());
}

TEST(Identities, GroupNamesAreDistinct) {
    std::set<std::string> names;
    for (int g = 1; g <= 8; ++g) names.insert(identity_group_name(g));
    EXPECT_EQ(names.size(), 8u);
}
