// SPDX-License-Identifier: Apache-2.0
//
// physi - GSVD precoding for MIMO broadcast channels with integrated services
// Copyright (C) 2026 The physi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "physi/allocation.hpp"
#include "physi/channel_io.hpp"
#include "physi/errors.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace physi {
namespace {

using testing::diagonal_factors;

bool contains(const IndexList& list, std::size_t i)
{
    return std::find(list.begin(), list.end(), i) != list.end();
}

TEST(Allocation, ThreeStrongCommonChannels)
{
    RVector c_sq(3);
    c_sq << 0.6, 0.7, 0.8;
    const GsvdFactors f = diagonal_factors(c_sq);
    const SchemeSet set = enumerate_schemes(f, classify_subchannels(f));
    ASSERT_EQ(set.size(), 8u);
    std::set<IndexList> distinct;
    for (std::size_t k = 0; k < set.size(); ++k) {
        EXPECT_NO_THROW(set.schemes[k].validate(3));
        EXPECT_EQ(set.ids[k], k);
        distinct.insert(set.schemes[k].gammac);
    }
    EXPECT_EQ(distinct.size(), 8u);
    EXPECT_EQ(set.schemes.front().gamma0.size(), 3u);
    EXPECT_EQ(set.schemes.back().gammac.size(), 3u);
}

TEST(Allocation, WeakCommonChannelsStayMulticast)
{
    RVector c_sq(3);
    c_sq << 0.2, 0.4, 0.5; // c^2 <= d^2 everywhere, 0.5 is a tie
    const GsvdFactors f = diagonal_factors(c_sq);
    const SchemeSet set = enumerate_schemes(f, classify_subchannels(f));
    ASSERT_EQ(set.size(), 1u);
    EXPECT_TRUE(set.schemes[0].gammac.empty());
    EXPECT_EQ(set.schemes[0].gamma0.size(), 3u);
    for (const AssignmentRule r : set.rules) EXPECT_EQ(r, AssignmentRule::WeakCommon);
}

TEST(Allocation, PrivateChannelsArePinned)
{
    // Look for a 4/2/3 pair whose single common channel favours receiver 1.
    bool found = false;
    for (std::uint64_t seed = 1; seed <= 50 && !found; ++seed) {
        const GsvdFactors f = gsvd(generate_channels(4, 2, 3, seed));
        const SubchannelPartition part = classify_subchannels(f);
        ASSERT_EQ(part.cc.size(), 1u);
        if (f.c_sq(static_cast<Eigen::Index>(part.cc[0])) <= f.d_sq(static_cast<Eigen::Index>(part.cc[0])))
            continue;
        found = true;
        const SchemeSet set = enumerate_schemes(f, part);
        ASSERT_EQ(set.size(), 2u);
        for (const auto& s : set.schemes) {
            for (const std::size_t i : part.pc1) EXPECT_TRUE(contains(s.gammac, i));
            for (const std::size_t i : part.pc2) EXPECT_TRUE(contains(s.discarded, i));
        }
        for (const std::size_t i : part.pc1) EXPECT_EQ(set.rules[i], AssignmentRule::AuthorizedPrivate);
        for (const std::size_t i : part.pc2) EXPECT_EQ(set.rules[i], AssignmentRule::UnauthorizedPrivate);
    }
    EXPECT_TRUE(found);
}

TEST(Allocation, RemoveScheme)
{
    RVector c_sq(3);
    c_sq << 0.6, 0.7, 0.8;
    const GsvdFactors f = diagonal_factors(c_sq);
    const SchemeSet set = enumerate_schemes(f, classify_subchannels(f));
    const SchemeSet fewer = remove_scheme(set, 3);
    ASSERT_EQ(fewer.size(), 7u);
    EXPECT_EQ(std::count(fewer.ids.begin(), fewer.ids.end(), 3u), 0);
    EXPECT_EQ(fewer.ids[3], 4u);
    EXPECT_THROW(remove_scheme(set, 8), IndexOutOfRange);

    SchemeSet one = set;
    while (one.size() > 1) one = remove_scheme(one, 0);
    EXPECT_TRUE(remove_scheme(one, 0).empty());
}

TEST(Allocation, RuleNames)
{
    EXPECT_STRNE(to_string(AssignmentRule::Free), to_string(AssignmentRule::WeakCommon));
}

} // namespace
} // namespace physi
