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

#ifndef PHYSI_GSVD_HPP
#define PHYSI_GSVD_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace physi {

using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using IndexList = std::vector<std::size_t>;

/// Gains closer than this are treated as equal (c_i^2 <= d_i^2 on a tie).
inline constexpr double kGainTieTolerance = 1e-12;

/// Channel matrices from the transmitter to the authorized receiver (h1, Nb x Nt)
/// and to the unauthorized receiver (h2, Ne x Nt). Noise is unit variance at both.
class ChannelPair {
public:
    ChannelPair() = default;

    /// Throws DimensionMismatch if the column counts differ or a matrix is empty,
    /// and std::invalid_argument if an entry is not finite.
    ChannelPair(CMatrix h1, CMatrix h2);

    const CMatrix& h1() const { return h1_; }
    const CMatrix& h2() const { return h2_; }

    std::size_t nt() const { return static_cast<std::size_t>(h1_.cols()); }
    std::size_t nb() const { return static_cast<std::size_t>(h1_.rows()); }
    std::size_t ne() const { return static_cast<std::size_t>(h2_.rows()); }

    bool operator==(const ChannelPair& other) const;

private:
    CMatrix h1_;
    CMatrix h2_;
};

/// Joint factorization H1 A = Psi_r C, H2 A = Psi_e D.
///
/// Subchannel i has amplitude gain c_diag[i] towards receiver 1 and d_diag[i]
/// towards receiver 2 with c_sq[i] + d_sq[i] = 1. Subchannels are ordered by
/// ascending c_sq, so private channels of receiver 2 come first and private
/// channels of receiver 1 come last.
struct GsvdFactors {
    CMatrix psi_r;  // Nb x Nb
    CMatrix psi_e;  // Ne x Ne
    RVector c_diag; // length q
    RVector d_diag; // length q
    CMatrix a;      // Nt x q
    std::size_t q = 0;
    RVector c_sq;
    RVector d_sq;
    RVector a_col_norm_sq;

    /// Nb x q gain matrix. Nonzero entries sit at (i - max(0, q - Nb), i).
    RMatrix c_matrix() const;

    /// Ne x q gain matrix. Nonzero entries sit at (i, i) for i < min(Ne, q).
    RMatrix d_matrix() const;
};

struct GsvdOptions {
    /// Singular values of [H1; H2] below rank_tolerance * sigma_max count as zero.
    double rank_tolerance = 1e-12;
};

/// Generalized SVD of a channel pair.
///
/// Thin QR of the stacked matrix followed by a cosine-sine split of the
/// orthonormal factor: the SVD of the upper block supplies Psi_r, C and the
/// right rotation; the lower block rotated by it has orthogonal columns that give
/// Psi_e and D. When Nt > Nb + Ne the pair is first restricted to the row space
/// of [H1; H2]. The largest-magnitude entry of each Psi_r column (Psi_e column
/// for subchannels with c = 0) is made real and nonnegative.
///
/// Throws RankDeficient when rank([H1; H2]) < min(Nt, Nb + Ne).
GsvdFactors gsvd(const ChannelPair& pair, const GsvdOptions& options = {});

/// Relative Frobenius residuals ||H1 A - Psi_r C|| / ||H1|| and the same for H2.
struct GsvdResiduals {
    double h1 = 0.0;
    double h2 = 0.0;
};
GsvdResiduals reconstruction_residuals(const ChannelPair& pair, const GsvdFactors& f);

struct SubchannelPartition {
    IndexList cc;  // common channels, visible to both receivers
    IndexList pc1; // private channels of receiver 1 (c = 1)
    IndexList pc2; // private channels of receiver 2 (d = 1)
    double tolerance = 1e-9;
};

/// Splits the q subchannels into CC / PC1 / PC2 by the distance of c_sq from
/// 0 and 1. `tolerance` must lie in (0, 0.5).
SubchannelPartition classify_subchannels(const GsvdFactors& f, double tolerance = 1e-9);

struct FeasibilityReport {
    bool multicast_infeasible = false;    // no common channel
    bool confidential_infeasible = false; // c_sq <= d_sq on every subchannel

    bool phy_si_feasible() const { return !multicast_infeasible && !confidential_infeasible; }
    std::string describe() const;
};

FeasibilityReport check_feasibility(const GsvdFactors& f, const SubchannelPartition& part);

/// Subchannel counts expected for generic full-rank channels, with the matching
/// configuration rows C1..C5 (several rows can apply to the same triple).
struct SubchannelCounts {
    std::size_t cc = 0;
    std::size_t pc1 = 0;
    std::size_t pc2 = 0;
    std::vector<std::string> configurations;
};

SubchannelCounts expected_subchannel_counts(std::size_t nt, std::size_t nb, std::size_t ne);

} // namespace physi

#endif
