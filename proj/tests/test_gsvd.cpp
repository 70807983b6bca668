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

#include "physi/channel_io.hpp"
#include "physi/errors.hpp"
#include "physi/gsvd.hpp"

#include <gtest/gtest.h>

#include <stdexcept>

namespace physi {
namespace {

using Eigen::Index;

// Reconstruction by explicit triple loops, independent of Eigen products.
double naive_residual(const CMatrix& h, const CMatrix& a, const CMatrix& psi, const RMatrix& g)
{
    double num = 0.0;
    double den = 0.0;
    for (Index i = 0; i < h.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            std::complex<double> lhs = 0.0;
            for (Index k = 0; k < h.cols(); ++k) lhs += h(i, k) * a(k, j);
            std::complex<double> rhs = 0.0;
            for (Index k = 0; k < psi.cols(); ++k) rhs += psi(i, k) * g(k, j);
            num += std::norm(lhs - rhs);
        }
        for (Index k = 0; k < h.cols(); ++k) den += std::norm(h(i, k));
    }
    return std::sqrt(num / den);
}

TEST(Gsvd, IdenticalIdentityChannelsSplitEvenly)
{
    const CMatrix eye = CMatrix::Identity(2, 2);
    const GsvdFactors f = gsvd(ChannelPair(eye, eye));
    ASSERT_EQ(f.q, 2u);
    for (Index i = 0; i < 2; ++i) {
        EXPECT_NEAR(f.c_sq(i), 0.5, 1e-12);
        EXPECT_NEAR(f.d_sq(i), 0.5, 1e-12);
    }
    const SubchannelPartition part = classify_subchannels(f);
    EXPECT_EQ(part.cc.size(), 2u);
    EXPECT_TRUE(part.pc1.empty());
    EXPECT_TRUE(part.pc2.empty());
    EXPECT_TRUE(check_feasibility(f, part).confidential_infeasible);
}

TEST(Gsvd, ReconstructionMatchesNaiveProducts)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const ChannelPair pair = generate_channels(3, 4, 3, seed);
        const GsvdFactors f = gsvd(pair);
        EXPECT_LE(naive_residual(pair.h1(), f.a, f.psi_r, f.c_matrix()), 1e-8);
        EXPECT_LE(naive_residual(pair.h2(), f.a, f.psi_e, f.d_matrix()), 1e-8);
        const GsvdResiduals r = reconstruction_residuals(pair, f);
        EXPECT_LE(r.h1, 1e-8);
        EXPECT_LE(r.h2, 1e-8);
    }
}

TEST(Gsvd, FactorStructure)
{
    struct Dims {
        std::size_t nt, nb, ne;
    };
    for (const Dims d : {Dims{3, 4, 2}, Dims{3, 2, 4}, Dims{4, 2, 3}, Dims{4, 2, 2}, Dims{5, 2, 2}}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const GsvdFactors f = gsvd(generate_channels(d.nt, d.nb, d.ne, seed));
            EXPECT_EQ(f.q, std::min(d.nt, d.nb + d.ne));
            const auto nb = static_cast<Index>(d.nb);
            const auto ne = static_cast<Index>(d.ne);
            EXPECT_LE((f.psi_r.adjoint() * f.psi_r - CMatrix::Identity(nb, nb)).norm(), 1e-10);
            EXPECT_LE((f.psi_e.adjoint() * f.psi_e - CMatrix::Identity(ne, ne)).norm(), 1e-10);
            const RMatrix c = f.c_matrix();
            const RMatrix dm = f.d_matrix();
            const auto q = static_cast<Index>(f.q);
            EXPECT_LE((c.transpose() * c + dm.transpose() * dm - RMatrix::Identity(q, q)).norm(), 1e-10);
            for (Index i = 0; i < q; ++i) {
                EXPECT_GE(f.c_diag(i), 0.0);
                EXPECT_LE(f.c_diag(i), 1.0);
                EXPECT_GE(f.d_diag(i), 0.0);
                EXPECT_LE(f.d_diag(i), 1.0);
                if (i > 0) {
                    EXPECT_GE(f.c_diag(i), f.c_diag(i - 1));
                    EXPECT_LE(f.d_diag(i), f.d_diag(i - 1));
                }
            }
        }
    }
}

TEST(Gsvd, SubchannelCountForWideTransmitter)
{
    EXPECT_EQ(gsvd(generate_channels(4, 2, 3, 7)).q, 4u);
}

TEST(Gsvd, ClassificationMatchesConfigurationTable)
{
    struct Row {
        std::size_t nt, nb, ne, cc, pc1, pc2;
    };
    for (const Row r : {Row{3, 4, 3, 3, 0, 0}, Row{4, 2, 3, 1, 1, 2}, Row{4, 2, 2, 0, 2, 2},
                        Row{3, 4, 2, 2, 1, 0}, Row{3, 2, 4, 2, 0, 1}}) {
        const SubchannelCounts expected = expected_subchannel_counts(r.nt, r.nb, r.ne);
        EXPECT_EQ(expected.cc, r.cc);
        EXPECT_EQ(expected.pc1, r.pc1);
        EXPECT_EQ(expected.pc2, r.pc2);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const SubchannelPartition part =
                classify_subchannels(gsvd(generate_channels(r.nt, r.nb, r.ne, seed)));
            EXPECT_EQ(part.cc.size(), r.cc);
            EXPECT_EQ(part.pc1.size(), r.pc1);
            EXPECT_EQ(part.pc2.size(), r.pc2);
        }
    }
    const SubchannelCounts c5 = expected_subchannel_counts(4, 2, 2);
    EXPECT_NE(std::find(c5.configurations.begin(), c5.configurations.end(), "C5"),
              c5.configurations.end());
}

TEST(Gsvd, FeasibilityFlags)
{
    const GsvdFactors wide = gsvd(generate_channels(4, 2, 2, 3));
    const FeasibilityReport rep = check_feasibility(wide, classify_subchannels(wide));
    EXPECT_TRUE(rep.multicast_infeasible);
    EXPECT_FALSE(rep.phy_si_feasible());
    EXPECT_FALSE(rep.describe().empty());

    const ChannelPair same = [] {
        const ChannelPair p = generate_channels(3, 3, 3, 4);
        return ChannelPair(p.h1(), p.h1());
    }();
    const GsvdFactors f = gsvd(same);
    EXPECT_TRUE(check_feasibility(f, classify_subchannels(f)).confidential_infeasible);

    const GsvdFactors ok = gsvd(generate_channels(3, 4, 3, 1));
    EXPECT_TRUE(check_feasibility(ok, classify_subchannels(ok)).phy_si_feasible());
}

TEST(Gsvd, Errors)
{
    EXPECT_THROW(ChannelPair(CMatrix::Ones(2, 3), CMatrix::Ones(2, 2)), DimensionMismatch);
    EXPECT_THROW(ChannelPair(CMatrix(0, 3), CMatrix::Ones(2, 3)), DimensionMismatch);

    // Rank 1 stack: every row is a multiple of the same vector.
    CMatrix row = CMatrix::Ones(1, 3);
    CMatrix h1(2, 3);
    h1 << row, 2.0 * row;
    EXPECT_THROW(gsvd(ChannelPair(h1, 3.0 * row)), RankDeficient);

    const GsvdFactors f = gsvd(generate_channels(3, 4, 3, 1));
    EXPECT_THROW(classify_subchannels(f, 0.0), std::invalid_argument);
    EXPECT_THROW(classify_subchannels(f, 0.5), std::invalid_argument);
}

TEST(Gsvd, Deterministic)
{
    const ChannelPair pair = generate_channels(3, 4, 3, 11);
    const GsvdFactors a = gsvd(pair);
    const GsvdFactors b = gsvd(pair);
    EXPECT_EQ(a.a, b.a);
    EXPECT_EQ(a.c_diag, b.c_diag);
    EXPECT_EQ(a.psi_e, b.psi_e);
}

} // namespace
} // namespace physi
