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
#include "physi/region.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace physi {
namespace {

constexpr double kPower = 100.0;

TEST(Sweep, PointsOnTheGridWithFallingSecrecyRate)
{
    const ChannelPair pair = generate_channels(3, 4, 3, 1);
    const RateRegion region = sweep_region(pair, kPower, 0.1);
    ASSERT_GT(region.points.size(), 10u);
    EXPECT_EQ(region.label, RegionLabel::Gsvd);
    for (std::size_t k = 0; k < region.points.size(); ++k) {
        const RegionPoint& p = region.points[k];
        EXPECT_NEAR(p.r_ms, 0.1 * static_cast<double>(k), 1e-12);
        EXPECT_GE(p.r_c, 0.0);
        ASSERT_TRUE(p.scheme_id.has_value());
        if (k > 0) EXPECT_LE(p.r_c, region.points[k - 1].r_c + 1e-6);
    }
    EXPECT_TRUE(region.rate_at(0).has_value());
    EXPECT_FALSE(region.rate_at(region.points.size()).has_value());
}

TEST(Sweep, FirstPointIsBestPureSecrecyRate)
{
    const ChannelPair pair = generate_channels(3, 4, 3, 2);
    const GsvdFactors f = gsvd(pair);
    const SchemeSet set = enumerate_schemes(f, classify_subchannels(f));
    double best = 0.0;
    for (const auto& s : set.schemes) {
        const DcResult r = dc_solve(f, s, 0.0, kPower);
        if (!r.infeasible()) best = std::max(best, r.solution->secrecy_rate);
    }
    const RateRegion region = sweep_region(pair, kPower, 0.1);
    EXPECT_NEAR(region.points.front().r_c, best, 1e-6);
}

TEST(Sweep, LastPointIsLastFeasibleRate)
{
    const ChannelPair pair = generate_channels(3, 4, 3, 3);
    const GsvdFactors f = gsvd(pair);
    const SchemeSet set = enumerate_schemes(f, classify_subchannels(f));
    const RateRegion region = sweep_region(pair, kPower, 0.1);
    const double next = region.points.back().r_ms + 0.1;
    for (const auto& s : set.schemes) EXPECT_TRUE(dc_solve(f, s, next, kPower).infeasible());
}

TEST(Sweep, InfeasiblePairThrows)
{
    try {
        sweep_region(generate_channels(4, 2, 2, 1), kPower, 0.1);
        FAIL() << "expected PhySiInfeasible";
    } catch (const PhySiInfeasible& e) {
        EXPECT_NE(std::string(e.what()).find("C5"), std::string::npos);
    }
}

TEST(Sweep, LargerBudgetNeverShrinksRegion)
{
    const ChannelPair pair = generate_channels(3, 4, 3, 4);
    const RateRegion low = sweep_region(pair, 10.0, 0.2);
    const RateRegion high = sweep_region(pair, 100.0, 0.2);
    ASSERT_GE(high.points.size(), low.points.size());
    for (std::size_t k = 0; k < low.points.size(); ++k)
        EXPECT_GE(high.points[k].r_c, low.points[k].r_c - 1e-6);
}

TEST(Sweep, VerifyRemovalsFindsNoRevival)
{
    SweepOptions opts;
    opts.verify_removals = true;
    const RateRegion region = sweep_region(generate_channels(3, 4, 3, 5), kPower, 0.2, {}, opts);
    for (const auto& note : region.notes) EXPECT_EQ(note.find("feasible again"), std::string::npos) << note;
}

TEST(Sweep, CsvLayout)
{
    const RateRegion region = sweep_region(generate_channels(3, 4, 3, 1), kPower, 0.5);
    std::ostringstream out;
    write_region_csv(out, region);
    const std::string text = out.str();
    EXPECT_EQ(text.rfind("r_ms,r_c,scheme_id,iterations,feasible_schemes_remaining\n", 0), 0u);
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
              region.points.size() + 1);
}

TEST(Tdma, EndpointsAndMidpoint)
{
    const TdmaEndpoints ends{8.0, 3.0};
    EXPECT_EQ(tdma_point(ends, 0.0), std::make_pair(0.0, 1.5));
    EXPECT_EQ(tdma_point(ends, 1.0), std::make_pair(4.0, 0.0));
    EXPECT_EQ(tdma_point(ends, 0.5), std::make_pair(2.0, 0.75));
}

TEST(Tdma, BaselineLiesOnTheSegment)
{
    const ChannelPair pair = generate_channels(3, 4, 3, 1);
    const TdmaEndpoints ends = tdma_endpoints(pair, kPower);
    EXPECT_GT(ends.multicast_max, 0.0);
    EXPECT_GT(ends.secrecy_max, 0.0);
    const RateRegion tdma = tdma_baseline(pair, kPower, 0.1);
    EXPECT_EQ(tdma.label, RegionLabel::Tdma);
    ASSERT_FALSE(tdma.points.empty());
    EXPECT_NEAR(tdma.points.front().r_c, ends.secrecy_max / 2.0, 1e-12);
    for (const auto& p : tdma.points) {
        EXPECT_LE(p.r_ms, ends.multicast_max / 2.0 + 1e-12);
        const double alpha = 2.0 * p.r_ms / ends.multicast_max;
        EXPECT_NEAR(p.r_c, (1.0 - alpha) * ends.secrecy_max / 2.0, 1e-12);
    }
    EXPECT_NEAR(tdma.metrics.at("halved_multicast"), ends.multicast_max / 2.0, 1e-12);
}

TEST(Tdma, GsvdRegionDominates)
{
    const ChannelPair pair = generate_channels(3, 4, 3, 1);
    const RateRegion gsvd_region = sweep_region(pair, kPower, 0.1);
    const RateRegion tdma = tdma_baseline(pair, kPower, 0.1);
    for (std::size_t k = 0; k < tdma.points.size(); ++k) {
        const auto r = gsvd_region.rate_at(k);
        ASSERT_TRUE(r.has_value());
        EXPECT_GE(*r, tdma.points[k].r_c);
    }
}

TEST(Pareto, KeepsOnlyUndominatedPairs)
{
    const auto front = pareto_frontier({{0, 3}, {1, 2}, {1, 1}, {2, 2.5}, {0.5, 3}, {3, 0}});
    ASSERT_EQ(front.size(), 3u);
    EXPECT_EQ(front[0].r0, 0.5);
    EXPECT_EQ(front[1].r0, 2.0);
    EXPECT_EQ(front[2].r0, 3.0);
}

TEST(GridReference, RequiresSmallDimensions)
{
    EXPECT_THROW(grid_reference_region(generate_channels(3, 2, 2, 1), kPower, 5), DimensionTooLarge);
}

TEST(GridReference, ZeroBudgetIsOrigin)
{
    const RateRegion r = grid_reference_region(generate_channels(2, 2, 2, 1), 0.0, 5);
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_EQ(r.points[0].r_ms, 0.0);
    EXPECT_EQ(r.points[0].r_c, 0.0);
}

TEST(GridReference, GsvdDictionaryTracksSweep)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const ChannelPair pair = generate_channels(2, 2, 2, seed);
        const GsvdFactors f = gsvd(pair);
        if (!check_feasibility(f, classify_subchannels(f)).phy_si_feasible()) continue;
        const RateRegion sweep = sweep_region(pair, kPower, 0.25);
        GridReferenceOptions opts;
        opts.dictionary = Dictionary::GsvdOnly;
        opts.delta = 0.25;
        const RateRegion grid = grid_reference_region(pair, kPower, 41, opts);
        for (std::size_t k = 0; k < sweep.points.size(); ++k) {
            const auto g = grid.rate_at(k);
            ASSERT_TRUE(g.has_value());
            EXPECT_NEAR(*g, sweep.points[k].r_c, 1e-1) << "seed " << seed << " k " << k;
        }
        return;
    }
    FAIL() << "no feasible 2x2x2 seed";
}

} // namespace
} // namespace physi
