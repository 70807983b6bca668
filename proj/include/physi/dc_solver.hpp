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

#ifndef PHYSI_DC_SOLVER_HPP
#define PHYSI_DC_SOLVER_HPP

#include "physi/barrier.hpp"
#include "physi/gsvd.hpp"
#include "physi/rates.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace physi {

/// Linearization point used for the first DC iteration.
enum class DcInit : std::uint8_t {
    Zero,   // p_c = 0
    Uniform // p_c,n = P / (2 N a_c,n)
};

struct DcConfig {
    double epsilon = 1e-6;          // stop when successive true objectives differ by less (bits)
    std::size_t max_dc_iters = 100;
    BarrierOptions barrier;
    std::size_t grid_points = 400;  // per-axis density of grid_oracle
    DcInit init = DcInit::Zero;
    /// After each surrogate solve y, try y + s (y - x) projected back onto the
    /// confidential budget and keep the best such point that increases the true
    /// objective enough. Iterates stay feasible and ascending. Plain DC crawls
    /// towards a power-budget optimum in steps of 1/d^2 - 1/c^2.
    bool boost = true;

    /// Throws std::invalid_argument on epsilon <= 0, max_dc_iters == 0 or mu <= 1.
    void validate() const;
};

/// Power allocation problem for one fixed subchannel allocation, with the
/// confidential objective linearized at pc_ref.
struct SubproblemInstance {
    RVector c2_conf; // c^2 on the confidential subchannels
    RVector d2_conf;
    RVector c2_mult; // c^2 on the multicast subchannels
    RVector d2_mult;
    RVector a_conf;  // power weights (squared column norms of A)
    RVector a_mult;
    double p_budget = 0.0;
    double r_ms = 0.0;
    RVector pc_ref;

    std::size_t m() const { return static_cast<std::size_t>(c2_mult.size()); }
    std::size_t n() const { return static_cast<std::size_t>(c2_conf.size()); }

    /// Throws DimensionMismatch / std::invalid_argument on inconsistent data.
    void validate() const;
};

SubproblemInstance make_instance(const GsvdFactors& f, const MessageAllocation& alloc,
                                 double r_ms, double p_budget);

/// Secrecy rate of the confidential powers pc under the instance gains.
double true_objective(const SubproblemInstance& inst, const RVector& pc);

/// Concave surrogate: log2(1 + pc c^2) minus the first-order expansion of
/// log2(1 + pc d^2) around pc_ref, summed over the confidential subchannels.
/// The tangent lies above the concave term, so the surrogate is a lower bound of
/// true_objective, exact at pc_ref.
double surrogate_objective(const SubproblemInstance& inst, const RVector& pc);

struct SubproblemResult {
    PowerSolution solution; // rates evaluated with the true objective
    double surrogate = 0.0;
    double kkt_residual = 0.0;
    std::size_t newton_steps = 0;
};

/// Maximizes the surrogate subject to both QoMS constraints, the power budget
/// and nonnegativity. Returns nullopt when no power vector meets the
/// constraints. Throws NumericalFailure on Newton breakdown.
std::optional<SubproblemResult> solve_subproblem(const SubproblemInstance& inst,
                                                 const DcConfig& cfg = {});

struct DcIterate {
    std::size_t iteration = 0;
    double true_objective = 0.0;
    double surrogate = 0.0;
    double step_norm = 0.0; // ||pc^(i) - pc^(i-1)||_2
    std::size_t newton_steps = 0;
    double kkt_residual = 0.0;
};

struct DcResult {
    std::optional<PowerSolution> solution; // nullopt: the allocation is infeasible
    std::vector<DcIterate> trace;
    bool converged = false;

    bool infeasible() const { return !solution.has_value(); }
    std::size_t iterations() const { return trace.size(); }
};

/// DC iteration for a fixed allocation: solve the surrogate, re-linearize at the
/// new confidential powers, stop once the true secrecy rate changes by less than
/// epsilon or after max_dc_iters. Feasibility is decided once by a phase I solve.
DcResult dc_solve(const GsvdFactors& f, const MessageAllocation& alloc, double r_ms,
                  double p_budget, const DcConfig& cfg = {});

/// Same iteration on a prepared instance (pc_ref is ignored).
DcResult dc_solve(const SubproblemInstance& inst, const DcConfig& cfg = {});

/// Improvement of the true objective after one more surrogate solve linearized
/// at `pc`. Used to check stationarity of a DC result.
double relinearized_gain(const SubproblemInstance& inst, const RVector& pc,
                         const DcConfig& cfg = {});

/// Writes the iteration trace as CSV.
void write_trace_csv(std::ostream& out, const DcResult& result);

/// Best true objective over a uniform grid of feasible power vectors
/// (grid_points values per axis from 0 to P / a). nullopt when no grid point
/// satisfies the QoMS constraints. Throws DimensionTooLarge when M + N > 4.
std::optional<double> grid_oracle(const SubproblemInstance& inst, std::size_t grid_points);

} // namespace physi

#endif
