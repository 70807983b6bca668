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

#include "physi/dc_solver.hpp"
#include "physi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace physi {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLn2 = std::numbers::ln2;

// Objective and constraints of the linearized power allocation problem over
// x = [p0; pc_active]. Confidential subchannels with c^2 = 0 are pinned to zero
// power and left out of x.
class SurrogateProgram final : public ConvexProgram {
public:
    explicit SurrogateProgram(const SubproblemInstance& inst) : inst_(inst)
    {
        with_qoms_ = inst.r_ms > 0.0;
        m_ = with_qoms_ ? static_cast<Index>(inst.m()) : 0;
        for (Index n = 0; n < inst.c2_conf.size(); ++n)
            if (inst.c2_conf(n) > 0.0) active_.push_back(n);
        dim_ = m_ + static_cast<Index>(active_.size());
        weights_.resize(dim_);
        for (Index j = 0; j < m_; ++j) weights_(j) = inst.a_mult(j);
        for (std::size_t k = 0; k < active_.size(); ++k)
            weights_(m_ + static_cast<Index>(k)) = inst.a_conf(active_[k]);
        slope_ = VectorXd::Zero(static_cast<Index>(active_.size()));
    }

    void linearize_at(const VectorXd& pc_ref)
    {
        for (std::size_t k = 0; k < active_.size(); ++k) {
            const Index n = active_[k];
            const double d2 = inst_.d2_conf(n);
            slope_(static_cast<Index>(k)) = d2 / (kLn2 * (1.0 + pc_ref(n) * d2));
        }
    }

    Index dimension() const override { return dim_; }
    Index constraint_count() const override { return (with_qoms_ ? 2 : 0) + 1 + dim_; }

    bool in_domain(const VectorXd& x) const override
    {
        if (!x.allFinite()) return false;
        for (Index j = 0; j < m_; ++j)
            if (1.0 + x(j) * std::max(inst_.c2_mult(j), inst_.d2_mult(j)) <= 0.0) return false;
        for (std::size_t k = 0; k < active_.size(); ++k)
            if (1.0 + x(m_ + static_cast<Index>(k)) * inst_.c2_conf(active_[k]) <= 0.0) return false;
        return true;
    }

    // Negated surrogate without the constant terms.
    double objective(const VectorXd& x) const override
    {
        double value = 0.0;
        for (std::size_t k = 0; k < active_.size(); ++k) {
            const double p = x(m_ + static_cast<Index>(k));
            value -= std::log2(1.0 + p * inst_.c2_conf(active_[k])) - slope_(static_cast<Index>(k)) * p;
        }
        return value;
    }

    void objective_derivatives(const VectorXd& x, double scale, VectorXd& grad,
                               MatrixXd& hess) const override
    {
        for (std::size_t k = 0; k < active_.size(); ++k) {
            const Index j = m_ + static_cast<Index>(k);
            const double c2 = inst_.c2_conf(active_[k]);
            const double denom = 1.0 + x(j) * c2;
            grad(j) += scale * (slope_(static_cast<Index>(k)) - c2 / (kLn2 * denom));
            hess(j, j) += scale * c2 * c2 / (kLn2 * denom * denom);
        }
    }

    double constraint(Index i, const VectorXd& x) const override
    {
        if (with_qoms_ && i < 2) {
            const RVector& gain = i == 0 ? inst_.c2_mult : inst_.d2_mult;
            double rate = 0.0;
            for (Index j = 0; j < m_; ++j) rate += std::log2(1.0 + x(j) * gain(j));
            return inst_.r_ms - rate;
        }
        const Index k = i - (with_qoms_ ? 2 : 0);
        if (k == 0) return weights_.dot(x) - inst_.p_budget;
        return -x(k - 1);
    }

    void constraint_gradient(Index i, const VectorXd& x, VectorXd& grad) const override
    {
        if (with_qoms_ && i < 2) {
            const RVector& gain = i == 0 ? inst_.c2_mult : inst_.d2_mult;
            for (Index j = 0; j < m_; ++j) grad(j) -= gain(j) / (kLn2 * (1.0 + x(j) * gain(j)));
            return;
        }
        const Index k = i - (with_qoms_ ? 2 : 0);
        if (k == 0)
            grad += weights_;
        else
            grad(k - 1) -= 1.0;
    }

    void add_constraint_hessian(Index i, const VectorXd& x, double scale,
                                MatrixXd& hess) const override
    {
        if (!(with_qoms_ && i < 2)) return;
        const RVector& gain = i == 0 ? inst_.c2_mult : inst_.d2_mult;
        for (Index j = 0; j < m_; ++j) {
            const double denom = 1.0 + x(j) * gain(j);
            hess(j, j) += scale * gain(j) * gain(j) / (kLn2 * denom * denom);
        }
    }

    VectorXd start_point() const
    {
        VectorXd x(dim_);
        for (Index j = 0; j < dim_; ++j)
            x(j) = inst_.p_budget / (2.0 * static_cast<double>(dim_) * weights_(j));
        return x;
    }

    // Splits x into dense (p0, pc) vectors, clamping round-off negatives.
    void unpack(const VectorXd& x, RVector& p0, RVector& pc) const
    {
        p0 = RVector::Zero(static_cast<Index>(inst_.m()));
        pc = RVector::Zero(static_cast<Index>(inst_.n()));
        for (Index j = 0; j < m_; ++j) p0(j) = std::max(0.0, x(j));
        for (std::size_t k = 0; k < active_.size(); ++k)
            pc(active_[k]) = std::max(0.0, x(m_ + static_cast<Index>(k)));
    }

private:
    const SubproblemInstance& inst_;
    bool with_qoms_ = false;
    Index m_ = 0;
    Index dim_ = 0;
    std::vector<Index> active_;
    VectorXd weights_;
    VectorXd slope_;
};

// Rate each receiver would see if the whole budget went to each multicast
// subchannel in turn; an upper bound on any feasible multicast rate.
bool qoms_trivially_infeasible(const SubproblemInstance& inst)
{
    if (inst.r_ms <= 0.0) return false;
    if (inst.m() == 0) return true;
    double r1 = 0.0;
    double r2 = 0.0;
    for (Index j = 0; j < inst.c2_mult.size(); ++j) {
        const double p = inst.p_budget / inst.a_mult(j);
        r1 += std::log2(1.0 + p * inst.c2_mult(j));
        r2 += std::log2(1.0 + p * inst.d2_mult(j));
    }
    return std::min(r1, r2) < inst.r_ms;
}

PowerSolution make_solution(const SubproblemInstance& inst, RVector p0, RVector pc)
{
    PowerSolution sol;
    sol.p0 = std::move(p0);
    sol.pc = std::move(pc);
    sol.secrecy_rate = true_objective(inst, sol.pc);
    double r1 = 0.0;
    double r2 = 0.0;
    for (Index j = 0; j < sol.p0.size(); ++j) {
        r1 += std::log2(1.0 + sol.p0(j) * inst.c2_mult(j));
        r2 += std::log2(1.0 + sol.p0(j) * inst.d2_mult(j));
    }
    sol.multicast_rate_1 = r1;
    sol.multicast_rate_2 = r2;
    sol.total_power = inst.a_mult.dot(sol.p0) + inst.a_conf.dot(sol.pc);
    return sol;
}

struct InnerSolve {
    RVector p0;
    RVector pc;
    double kkt = 0.0;
    std::size_t newton_steps = 0;
};

InnerSolve solve_linearized(SurrogateProgram& prog, const VectorXd& start, const RVector& pc_ref,
                            const DcConfig& cfg)
{
    prog.linearize_at(pc_ref);
    InnerSolve out;
    if (prog.dimension() == 0) {
        prog.unpack(start, out.p0, out.pc);
        return out;
    }
    const BarrierResult res = barrier_solve(prog, start, cfg.barrier);
    prog.unpack(res.x, out.p0, out.pc);
    out.kkt = res.kkt_residual;
    out.newton_steps = res.newton_steps;
    return out;
}

std::optional<VectorXd> phase_one(const SurrogateProgram& prog, const DcConfig& cfg)
{
    if (prog.dimension() == 0) return VectorXd(0);
    return find_strictly_feasible(prog, prog.start_point(), cfg.barrier);
}

RVector initial_reference(const SubproblemInstance& inst, DcInit init)
{
    RVector ref = RVector::Zero(static_cast<Index>(inst.n()));
    if (init == DcInit::Uniform && inst.n() > 0) {
        const double share = inst.p_budget / (2.0 * static_cast<double>(inst.n()));
        for (Index n = 0; n < ref.size(); ++n) ref(n) = share / inst.a_conf(n);
    }
    return ref;
}

// Euclidean projection of v onto {z >= 0, a.z <= budget}: z = max(v - tau a, 0)
// with tau >= 0 found by bisection.
RVector project_budget(const RVector& v, const RVector& a, double budget)
{
    RVector z = v.cwiseMax(0.0);
    if (a.dot(z) <= budget) return z;
    double lo = 0.0;
    double hi = 0.0;
    for (Index n = 0; n < v.size(); ++n) hi = std::max(hi, v(n) / a(n));
    for (int k = 0; k < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++k) {
        const double mid = 0.5 * (lo + hi);
        if (a.dot((v - mid * a).cwiseMax(0.0)) > budget)
            lo = mid;
        else
            hi = mid;
    }
    return (v - hi * a).cwiseMax(0.0);
}

// Extrapolates the DC step x -> y along y - x, projected back onto the
// confidential budget left after p0. Tries s = 2^10 down to 2^-30 and keeps
// the best point that clears a sufficient-increase test against y.
RVector boosted(const SubproblemInstance& inst, const RVector& p0, const RVector& x, const RVector& y)
{
    constexpr double kSufficient = 1e-8;
    const RVector d = y - x;
    const double dd = d.squaredNorm();
    if (!(dd > 0.0)) return y;
    const double budget = std::max(0.0, inst.p_budget - inst.a_mult.dot(p0));

    const double base = true_objective(inst, y);
    RVector best = y;
    double best_value = base;
    for (int k = 10; k >= -30; --k) {
        const double s = std::ldexp(1.0, k);
        RVector z = project_budget(y + s * d, inst.a_conf, budget);
        for (Index n = 0; n < z.size(); ++n)
            if (inst.c2_conf(n) == 0.0) z(n) = 0.0;
        const double value = true_objective(inst, z);
        if (value >= base + kSufficient * (z - y).squaredNorm() && value > best_value) {
            best = std::move(z);
            best_value = value;
        }
    }
    return best;
}

} // namespace

void DcConfig::validate() const
{
    if (!(epsilon > 0.0)) throw std::invalid_argument("DcConfig: epsilon must be positive");
    if (max_dc_iters < 1) throw std::invalid_argument("DcConfig: max_dc_iters must be >= 1");
    if (!(barrier.mu > 1.0)) throw std::invalid_argument("DcConfig: barrier mu must exceed 1");
    if (!(barrier.t_initial > 0.0)) throw std::invalid_argument("DcConfig: barrier t must be positive");
    if (!(barrier.gap_tolerance > 0.0))
        throw std::invalid_argument("DcConfig: duality gap target must be positive");
}

void SubproblemInstance::validate() const
{
    if (d2_conf.size() != c2_conf.size() || a_conf.size() != c2_conf.size() ||
        pc_ref.size() != c2_conf.size())
        throw DimensionMismatch("SubproblemInstance: confidential vectors differ in length");
    if (d2_mult.size() != c2_mult.size() || a_mult.size() != c2_mult.size())
        throw DimensionMismatch("SubproblemInstance: multicast vectors differ in length");
    auto unit = [](const RVector& v) {
        return (v.array() >= 0.0).all() && (v.array() <= 1.0 + 1e-12).all();
    };
    if (!unit(c2_conf) || !unit(d2_conf) || !unit(c2_mult) || !unit(d2_mult))
        throw std::invalid_argument("SubproblemInstance: gains must lie in [0, 1]");
    if (!(a_conf.array() > 0.0).all() || !(a_mult.array() > 0.0).all())
        throw std::invalid_argument("SubproblemInstance: power weights must be positive");
    if (!(pc_ref.array() >= 0.0).all())
        throw std::invalid_argument("SubproblemInstance: linearization point must be >= 0");
    if (!(p_budget >= 0.0) || !(r_ms >= 0.0))
        throw std::invalid_argument("SubproblemInstance: budget and QoMS target must be >= 0");
}

SubproblemInstance make_instance(const GsvdFactors& f, const MessageAllocation& alloc, double r_ms,
                                 double p_budget)
{
    alloc.validate(f.q);
    SubproblemInstance inst;
    const auto m = static_cast<Index>(alloc.m());
    const auto n = static_cast<Index>(alloc.n());
    inst.c2_mult.resize(m);
    inst.d2_mult.resize(m);
    inst.a_mult.resize(m);
    for (Index j = 0; j < m; ++j) {
        const auto i = static_cast<Index>(alloc.gamma0[static_cast<std::size_t>(j)]);
        inst.c2_mult(j) = f.c_sq(i);
        inst.d2_mult(j) = f.d_sq(i);
        inst.a_mult(j) = f.a_col_norm_sq(i);
    }
    inst.c2_conf.resize(n);
    inst.d2_conf.resize(n);
    inst.a_conf.resize(n);
    for (Index j = 0; j < n; ++j) {
        const auto i = static_cast<Index>(alloc.gammac[static_cast<std::size_t>(j)]);
        inst.c2_conf(j) = f.c_sq(i);
        inst.d2_conf(j) = f.d_sq(i);
        inst.a_conf(j) = f.a_col_norm_sq(i);
    }
    inst.p_budget = p_budget;
    inst.r_ms = r_ms;
    inst.pc_ref = RVector::Zero(n);
    return inst;
}

double true_objective(const SubproblemInstance& inst, const RVector& pc)
{
    if (static_cast<std::size_t>(pc.size()) != inst.n())
        throw DimensionMismatch("true_objective: power vector length differs from N");
    double value = 0.0;
    for (Index n = 0; n < pc.size(); ++n)
        value += std::log2(1.0 + pc(n) * inst.c2_conf(n)) - std::log2(1.0 + pc(n) * inst.d2_conf(n));
    return value;
}

double surrogate_objective(const SubproblemInstance& inst, const RVector& pc)
{
    if (static_cast<std::size_t>(pc.size()) != inst.n() || inst.pc_ref.size() != pc.size())
        throw DimensionMismatch("surrogate_objective: power vector length differs from N");
    double value = 0.0;
    for (Index n = 0; n < pc.size(); ++n) {
        const double d2 = inst.d2_conf(n);
        const double ref = inst.pc_ref(n);
        value += std::log2(1.0 + pc(n) * inst.c2_conf(n)) - std::log2(1.0 + ref * d2) -
                 d2 * (pc(n) - ref) / (kLn2 * (1.0 + ref * d2));
    }
    return value;
}

std::optional<SubproblemResult> solve_subproblem(const SubproblemInstance& inst, const DcConfig& cfg)
{
    inst.validate();
    cfg.validate();
    if (qoms_trivially_infeasible(inst)) return std::nullopt;

    SurrogateProgram prog(inst);
    const auto start = phase_one(prog, cfg);
    if (!start) return std::nullopt;

    const InnerSolve inner = solve_linearized(prog, *start, inst.pc_ref, cfg);
    SubproblemResult res;
    res.solution = make_solution(inst, inner.p0, inner.pc);
    res.surrogate = surrogate_objective(inst, res.solution.pc);
    res.kkt_residual = inner.kkt;
    res.newton_steps = inner.newton_steps;
    return res;
}

DcResult dc_solve(const SubproblemInstance& base, const DcConfig& cfg)
{
    cfg.validate();
    SubproblemInstance inst = base;
    inst.pc_ref = initial_reference(inst, cfg.init);
    inst.validate();

    DcResult result;
    if (qoms_trivially_infeasible(inst)) return result;

    SurrogateProgram prog(inst);
    const auto start = phase_one(prog, cfg);
    if (!start) return result;

    double previous = 0.0;
    RVector p0;
    RVector pc;
    for (std::size_t i = 1; i <= cfg.max_dc_iters; ++i) {
        const InnerSolve inner = solve_linearized(prog, *start, inst.pc_ref, cfg);
        p0 = inner.p0;
        pc = cfg.boost ? boosted(inst, inner.p0, inst.pc_ref, inner.pc) : inner.pc;

        DcIterate it;
        it.iteration = i;
        it.true_objective = true_objective(inst, pc);
        it.surrogate = surrogate_objective(inst, pc);
        it.step_norm = (pc - inst.pc_ref).norm();
        it.newton_steps = inner.newton_steps;
        it.kkt_residual = inner.kkt;
        result.trace.push_back(it);

        const bool done = std::abs(it.true_objective - previous) < cfg.epsilon;
        previous = it.true_objective;
        inst.pc_ref = pc;
        if (done) {
            result.converged = true;
            break;
        }
    }
    if (inst.r_ms <= 0.0) p0.setZero();
    result.solution = make_solution(inst, p0, pc);
    return result;
}

DcResult dc_solve(const GsvdFactors& f, const MessageAllocation& alloc, double r_ms,
                  double p_budget, const DcConfig& cfg)
{
    if (!(p_budget > 0.0)) throw std::invalid_argument("dc_solve: power budget must be positive");
    if (!(r_ms >= 0.0)) throw std::invalid_argument("dc_solve: r_ms must be nonnegative");
    return dc_solve(make_instance(f, alloc, r_ms, p_budget), cfg);
}

double relinearized_gain(const SubproblemInstance& base, const RVector& pc, const DcConfig& cfg)
{
    SubproblemInstance inst = base;
    inst.pc_ref = pc;
    const auto res = solve_subproblem(inst, cfg);
    if (!res) throw NumericalFailure("relinearized_gain: instance became infeasible");
    return res->solution.secrecy_rate - true_objective(inst, pc);
}

void write_trace_csv(std::ostream& out, const DcResult& result)
{
    out << "iteration,true_objective,surrogate_objective,step_norm,newton_steps,kkt_residual\n";
    out.precision(17);
    for (const auto& it : result.trace)
        out << it.iteration << ',' << it.true_objective << ',' << it.surrogate << ','
            << it.step_norm << ',' << it.newton_steps << ',' << it.kkt_residual << '\n';
}

namespace {

// Depth-first walk over a per-axis grid. `cost[axis][k]` is nondecreasing in k,
// so the walk stops along an axis once the running cost exceeds `limit`.
template <typename Visit>
void walk_grid(const std::vector<std::vector<double>>& cost, double limit, std::size_t axis,
               double spent, std::vector<std::size_t>& at, Visit&& visit)
{
    if (axis == cost.size()) {
        visit(at, spent);
        return;
    }
    for (std::size_t k = 0; k < cost[axis].size(); ++k) {
        const double next = spent + cost[axis][k];
        if (next > limit) break;
        at[axis] = k;
        walk_grid(cost, limit, axis + 1, next, at, visit);
    }
}

} // namespace

std::optional<double> grid_oracle(const SubproblemInstance& inst, std::size_t grid_points)
{
    inst.validate();
    if (inst.m() + inst.n() > 4) {
        std::ostringstream msg;
        msg << "grid_oracle: M + N = " << inst.m() + inst.n() << " exceeds 4";
        throw DimensionTooLarge(msg.str());
    }
    if (grid_points < 1) throw std::invalid_argument("grid_oracle: need at least one grid point");

    // Budget comparisons get a relative slack so the full-power grid point counts.
    const double limit = inst.p_budget * (1.0 + 1e-12);
    auto axis_power = [&](double weight) {
        std::vector<double> powers(grid_points, 0.0);
        for (std::size_t k = 0; k < grid_points && grid_points > 1; ++k)
            powers[k] = inst.p_budget / weight * static_cast<double>(k) /
                        static_cast<double>(grid_points - 1);
        return powers;
    };

    // The objective depends on the confidential powers only and the multicast
    // powers only enter through the shared budget, so the joint grid maximum is
    // reached with the cheapest QoMS-feasible multicast grid point.
    std::vector<std::vector<double>> mult_cost;
    std::vector<std::vector<double>> rate1;
    std::vector<std::vector<double>> rate2;
    for (Index j = 0; j < static_cast<Index>(inst.m()); ++j) {
        const auto powers = axis_power(inst.a_mult(j));
        std::vector<double> cost(grid_points), r1(grid_points), r2(grid_points);
        for (std::size_t k = 0; k < grid_points; ++k) {
            cost[k] = inst.a_mult(j) * powers[k];
            r1[k] = std::log2(1.0 + powers[k] * inst.c2_mult(j));
            r2[k] = std::log2(1.0 + powers[k] * inst.d2_mult(j));
        }
        mult_cost.push_back(std::move(cost));
        rate1.push_back(std::move(r1));
        rate2.push_back(std::move(r2));
    }

    double cheapest = std::numeric_limits<double>::infinity();
    {
        std::vector<std::size_t> at(inst.m(), 0);
        walk_grid(mult_cost, limit, 0, 0.0, at, [&](const std::vector<std::size_t>& idx, double spent) {
            double r1 = 0.0;
            double r2 = 0.0;
            for (std::size_t j = 0; j < idx.size(); ++j) {
                r1 += rate1[j][idx[j]];
                r2 += rate2[j][idx[j]];
            }
            if (r1 >= inst.r_ms && r2 >= inst.r_ms) cheapest = std::min(cheapest, spent);
        });
    }
    if (!std::isfinite(cheapest)) return std::nullopt;

    std::vector<std::vector<double>> conf_cost;
    std::vector<std::vector<double>> gain;
    for (Index n = 0; n < static_cast<Index>(inst.n()); ++n) {
        const auto powers = axis_power(inst.a_conf(n));
        std::vector<double> cost(grid_points), h(grid_points);
        for (std::size_t k = 0; k < grid_points; ++k) {
            cost[k] = inst.a_conf(n) * powers[k];
            h[k] = std::log2(1.0 + powers[k] * inst.c2_conf(n)) -
                   std::log2(1.0 + powers[k] * inst.d2_conf(n));
        }
        conf_cost.push_back(std::move(cost));
        gain.push_back(std::move(h));
    }

    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> at(inst.n(), 0);
    walk_grid(conf_cost, limit - cheapest, 0, 0.0, at,
              [&](const std::vector<std::size_t>& idx, double) {
                  double value = 0.0;
                  for (std::size_t n = 0; n < idx.size(); ++n) value += gain[n][idx[n]];
                  best = std::max(best, value);
              });
    return best;
}

} // namespace physi
