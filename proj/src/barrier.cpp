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

#include "physi/barrier.hpp"
#include "physi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace physi {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kArmijo = 0.01;
constexpr double kBacktrack = 0.5;
constexpr double kMinStep = 1e-12;
// Newton decrement (lambda^2 / 2) accepted when round-off stalls the line search.
constexpr double kStalledDecrement = 1e-7;
constexpr double kStalledPerT = 1e-13;
constexpr double kRoundoffFloor = 64.0 * std::numeric_limits<double>::epsilon();

bool strictly_feasible(const ConvexProgram& prog, const VectorXd& x)
{
    if (!prog.in_domain(x)) return false;
    for (Index i = 0; i < prog.constraint_count(); ++i)
        if (!(prog.constraint(i, x) < 0.0)) return false;
    return true;
}

double centering_value(const ConvexProgram& prog, const VectorXd& x, double t)
{
    double value = t * prog.objective(x);
    for (Index i = 0; i < prog.constraint_count(); ++i) value -= std::log(-prog.constraint(i, x));
    return value;
}

class Centering {
public:
    Centering(const ConvexProgram& prog) :
        prog_(prog), n_(prog.dimension()), grad_(n_), hess_(n_, n_), cgrad_(n_)
    {
    }

    // Damped Newton on t f0 - sum log(-f_i). Returns the number of steps taken.
    std::size_t run(VectorXd& x, double t, const BarrierOptions& options)
    {
        for (std::size_t step = 0; step < options.max_newton_steps; ++step) {
            derivatives(x, t);
            Eigen::LDLT<MatrixXd> ldlt(hess_);
            VectorXd dx = -ldlt.solve(grad_);
            if (ldlt.info() != Eigen::Success || !dx.allFinite() || ldlt.isNegative()) {
                const double shift = 1e-12 * std::max(1.0, hess_.diagonal().cwiseAbs().maxCoeff());
                hess_.diagonal().array() += shift;
                dx = -hess_.llt().solve(grad_);
                if (!dx.allFinite()) throw NumericalFailure("barrier: singular Newton system");
            }
            const double decrement = -grad_.dot(dx);
            if (decrement / 2.0 <= options.newton_tolerance) return step;

            // Below this the predicted decrease is lost in the rounding of f_here.
            const double f_here = centering_value(prog_, x, t);
            const double floor = kRoundoffFloor * std::max(1.0, std::abs(f_here));
            if (decrement / 2.0 <= floor) return step;
            double s = 1.0;
            VectorXd trial = x + s * dx;
            while (s > kMinStep && !strictly_feasible(prog_, trial)) {
                s *= kBacktrack;
                trial = x + s * dx;
            }
            while (s > kMinStep && centering_value(prog_, trial, t) > f_here - kArmijo * s * decrement) {
                s *= kBacktrack;
                trial = x + s * dx;
            }
            if (s <= kMinStep || trial == x) {
                // lambda^2 / (2 t) bounds the suboptimality in objective units.
                if (decrement / 2.0 <= std::max(kStalledDecrement, kStalledPerT * t)) return step;
                std::ostringstream msg;
                msg << "barrier: line search stalled at t = " << t << " with Newton decrement "
                    << decrement;
                throw NumericalFailure(msg.str());
            }
            x = trial;
        }
        std::ostringstream msg;
        msg << "barrier: centering did not converge in " << options.max_newton_steps
            << " Newton steps at t = " << t;
        throw NumericalFailure(msg.str());
    }

private:
    void derivatives(const VectorXd& x, double t)
    {
        grad_.setZero();
        hess_.setZero();
        prog_.objective_derivatives(x, t, grad_, hess_);
        for (Index i = 0; i < prog_.constraint_count(); ++i) {
            const double fi = prog_.constraint(i, x);
            const double inv = -1.0 / fi;
            cgrad_.setZero();
            prog_.constraint_gradient(i, x, cgrad_);
            grad_ += inv * cgrad_;
            hess_.noalias() += (inv * inv) * cgrad_ * cgrad_.transpose();
            prog_.add_constraint_hessian(i, x, inv, hess_);
        }
    }

    const ConvexProgram& prog_;
    Index n_;
    VectorXd grad_;
    MatrixXd hess_;
    VectorXd cgrad_;
};

VectorXd duals_at(const ConvexProgram& prog, const VectorXd& x, double t)
{
    VectorXd duals(prog.constraint_count());
    for (Index i = 0; i < prog.constraint_count(); ++i) duals(i) = -1.0 / (t * prog.constraint(i, x));
    return duals;
}

// min s  s.t.  f_i(x) - s <= 0, over z = [x; s].
class PhaseOne final : public ConvexProgram {
public:
    explicit PhaseOne(const ConvexProgram& inner) : inner_(inner), n_(inner.dimension()) {}

    Index dimension() const override { return n_ + 1; }
    Index constraint_count() const override { return inner_.constraint_count(); }
    bool in_domain(const VectorXd& z) const override { return inner_.in_domain(z.head(n_)); }
    double objective(const VectorXd& z) const override { return z(n_); }
    void objective_derivatives(const VectorXd&, double scale, VectorXd& grad,
                               MatrixXd&) const override
    {
        grad(n_) += scale;
    }
    double constraint(Index i, const VectorXd& z) const override
    {
        return inner_.constraint(i, z.head(n_)) - z(n_);
    }
    void constraint_gradient(Index i, const VectorXd& z, VectorXd& grad) const override
    {
        VectorXd head = VectorXd::Zero(n_);
        inner_.constraint_gradient(i, z.head(n_), head);
        grad.head(n_) += head;
        grad(n_) -= 1.0;
    }
    void add_constraint_hessian(Index i, const VectorXd& z, double scale,
                                MatrixXd& hess) const override
    {
        MatrixXd block = MatrixXd::Zero(n_, n_);
        inner_.add_constraint_hessian(i, z.head(n_), scale, block);
        hess.topLeftCorner(n_, n_) += block;
    }

private:
    const ConvexProgram& inner_;
    Index n_;
};

} // namespace

double kkt_residual(const ConvexProgram& prog, const VectorXd& x, const VectorXd& duals)
{
    const Index n = prog.dimension();
    VectorXd stationarity = VectorXd::Zero(n);
    MatrixXd unused = MatrixXd::Zero(n, n);
    prog.objective_derivatives(x, 1.0, stationarity, unused);
    double worst = 0.0;
    VectorXd g(n);
    for (Index i = 0; i < prog.constraint_count(); ++i) {
        g.setZero();
        prog.constraint_gradient(i, x, g);
        stationarity += duals(i) * g;
        const double fi = prog.constraint(i, x);
        worst = std::max(worst, std::abs(duals(i) * fi));
        worst = std::max(worst, fi);
    }
    if (n > 0) worst = std::max(worst, stationarity.cwiseAbs().maxCoeff());
    return worst;
}

BarrierResult barrier_solve(const ConvexProgram& prog, const VectorXd& x0,
                            const BarrierOptions& options)
{
    if (!strictly_feasible(prog, x0))
        throw NumericalFailure("barrier: starting point is not strictly feasible");

    BarrierResult res;
    res.x = x0;
    const auto m = static_cast<double>(prog.constraint_count());
    if (prog.dimension() == 0 || m == 0.0) {
        res.duals = VectorXd::Zero(prog.constraint_count());
        res.objective = prog.objective(res.x);
        return res;
    }

    Centering centering(prog);
    double t = options.t_initial;
    for (;;) {
        res.newton_steps += centering.run(res.x, t, options);
        ++res.outer_steps;
        if (m / t < options.gap_tolerance) break;
        t *= options.mu;
    }
    res.duals = duals_at(prog, res.x, t);
    res.objective = prog.objective(res.x);
    res.kkt_residual = kkt_residual(prog, res.x, res.duals);
    return res;
}

std::optional<VectorXd> find_strictly_feasible(const ConvexProgram& prog, const VectorXd& x0,
                                               const BarrierOptions& options)
{
    if (strictly_feasible(prog, x0)) return x0;
    if (!prog.in_domain(x0)) throw NumericalFailure("phase I: starting point outside domain");

    const Index n = prog.dimension();
    const Index m = prog.constraint_count();
    double worst = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m; ++i) worst = std::max(worst, prog.constraint(i, x0));

    PhaseOne phase(prog);
    VectorXd z(n + 1);
    z.head(n) = x0;
    z(n) = worst + 1.0;

    Centering centering(phase);
    double t = options.t_initial;
    for (;;) {
        centering.run(z, t, options);
        const double s = z(n);
        if (s < 0.0) {
            VectorXd x = z.head(n);
            if (strictly_feasible(prog, x)) return x;
        }
        // Dual lower bound on the optimal s.
        if (s - static_cast<double>(m) / t > 0.0) return std::nullopt;
        if (static_cast<double>(m) / t < options.gap_tolerance) return std::nullopt;
        t *= options.mu;
    }
}

} // namespace physi
