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

#ifndef PHYSI_REGION_HPP
#define PHYSI_REGION_HPP

#include "physi/allocation.hpp"
#include "physi/dc_solver.hpp"
#include "physi/gsvd.hpp"
#include "physi/rates.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace physi {

enum class RegionLabel : std::uint8_t { Gsvd, Tdma, GridReference };

const char* to_string(RegionLabel label);

/// One boundary point (r_ms, r_c) of a rate region.
struct RegionPoint {
    double r_ms = 0.0;
    double r_c = 0.0;
    std::optional<std::size_t> scheme_id; // winning allocation (GSVD sweep only)
    std::size_t iterations = 0;           // DC iterations of the winner
    std::size_t feasible_schemes_remaining = 0;
    std::vector<std::string> failures;    // per-scheme solver failures at this point

    // Winning allocation and powers (GSVD sweep only).
    MessageAllocation allocation;
    RVector p0;
    RVector pc;
};

struct RateRegion {
    RegionLabel label = RegionLabel::Gsvd;
    double delta = 0.1;
    double p_budget = 0.0;
    std::vector<RegionPoint> points;
    std::map<std::string, double> metrics;
    std::vector<std::string> notes;

    /// Points where the winning scheme differs from the previous point.
    std::vector<double> switching_points() const;

    /// r_c stored at r_ms = k * delta, if present.
    std::optional<double> rate_at(std::size_t k) const;
};

struct SweepOptions {
    /// Re-solve removed schemes at every later r_ms and note any that become
    /// feasible again.
    bool verify_removals = false;
    double classify_tolerance = 1e-9;
};

/// Traces the GSVD region: for r_ms = 0, delta, 2 delta, ... solves every
/// remaining allocation scheme, keeps the best secrecy rate (lowest scheme id on
/// ties) and drops schemes that became infeasible. Stops when no scheme is left
/// or r_ms exceeds the full-power multicast bound over the common channels.
/// Throws PhySiInfeasible when the channel pair cannot serve both messages.
RateRegion sweep_region(const ChannelPair& pair, double p_budget, double delta,
                        const DcConfig& cfg = {}, const SweepOptions& options = {});

/// Largest rate of each message when it is sent alone over the GSVD subchannels.
struct TdmaEndpoints {
    double multicast_max = 0.0; // max-min multicast rate over the common channels
    double secrecy_max = 0.0;   // best secrecy rate with r_ms = 0
};

TdmaEndpoints tdma_endpoints(const ChannelPair& pair, double p_budget, const DcConfig& cfg = {});

/// Two equal slots, one per message, with time-sharing fraction alpha between
/// the single-message operating points: (alpha R_mc / 2, (1 - alpha) R_c / 2).
/// alpha = 0 gives (0, R_c / 2), alpha = 1 gives (R_mc / 2, 0).
std::pair<double, double> tdma_point(const TdmaEndpoints& ends, double alpha);

/// TDMA segment sampled at r_ms = k * delta for k * delta <= R_mc / 2.
RateRegion tdma_baseline(const ChannelPair& pair, double p_budget, double delta,
                         const DcConfig& cfg = {});

/// Transmit covariance pair (Q0, Qc).
struct CovariancePair {
    CMatrix q0;
    CMatrix qc;
};

enum class Dictionary : std::uint8_t {
    GsvdOnly, // columns of A, each carrying at most one message
    Full      // GSVD directions plus channel singular vectors and random unitaries
};

struct GridReferenceOptions {
    Dictionary dictionary = Dictionary::Full;
    std::size_t random_unitaries = 4;
    std::uint64_t seed = 1;
    double delta = 0.1;
    /// Evaluated in addition to the dictionary, e.g. the covariances of a sweep.
    std::vector<CovariancePair> extra_pairs;
};

/// Rate pair of every candidate covariance pair searched by the grid reference.
struct RatePair {
    double r0 = 0.0;
    double rc = 0.0;
};

/// Pareto-optimal subset of `candidates`, sorted by increasing r0.
std::vector<RatePair> pareto_frontier(std::vector<RatePair> candidates);

/// Brute-force inner bound of the secrecy capacity region. Covariances are
/// V diag(p) V^H for dictionary directions V with every per-column power on a
/// `grid`-point axis, evaluated with the log-det rate expressions. Requires
/// Nt, Nb, Ne <= 2 (DimensionTooLarge otherwise).
RateRegion grid_reference_region(const ChannelPair& pair, double p_budget, std::size_t grid,
                                 const GridReferenceOptions& options = {});

/// Covariance pairs realized by the winning allocations of a GSVD sweep.
std::vector<CovariancePair> region_covariances(const GsvdFactors& f, const RateRegion& region);

/// CSV with columns r_ms,r_c,scheme_id,iterations,feasible_schemes_remaining.
void write_region_csv(std::ostream& out, const RateRegion& region);

} // namespace physi

#endif
