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

#ifndef PHYSI_BARRIER_HPP
#define PHYSI_BARRIER_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <optional>

namespace physi {

/// Smooth convex program: minimize f0(x) subject to f_i(x) <= 0.
///
/// Implementations add t * grad / t * Hessian contributions into the supplied
/// buffers; they never resize them.
class ConvexProgram {
public:
    virtual ~ConvexProgram() = default;

    virtual Eigen::Index dimension() const = 0;
    virtual Eigen::Index constraint_count() const = 0;

    /// False when x is outside the domain of f0 or of some f_i.
    virtual bool in_domain(const Eigen::VectorXd& x) const = 0;

    virtual double objective(const Eigen::VectorXd& x) const = 0;
    virtual void objective_derivatives(const Eigen::VectorXd& x, double scale,
                                       Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const = 0;

    virtual double constraint(Eigen::Index i, const Eigen::VectorXd& x) const = 0;
    virtual void constraint_gradient(Eigen::Index i, const Eigen::VectorXd& x,
                                     Eigen::VectorXd& grad) const = 0;
    /// Adds scale * Hessian of f_i. Affine constraints leave `hess` alone.
    virtual void add_constraint_hessian(Eigen::Index i, const Eigen::VectorXd& x, double scale,
                                        Eigen::MatrixXd& hess) const = 0;
};

struct BarrierOptions {
    double t_initial = 1.0;
    double mu = 20.0;
    double gap_tolerance = 1e-10;   // stop once m / t falls below this
    double newton_tolerance = 1e-12; // lambda^2 / 2 target for each centering step
    std::size_t max_newton_steps = 200;
};

struct BarrierResult {
    Eigen::VectorXd x;
    Eigen::VectorXd duals; // lambda_i = 1 / (-t f_i(x))
    double objective = 0.0;
    double kkt_residual = 0.0;
    std::size_t newton_steps = 0;
    std::size_t outer_steps = 0;
};

/// Log-barrier interior point method with damped Newton centering. `x0` must be
/// strictly feasible. Throws NumericalFailure when a centering step does not
/// converge.
BarrierResult barrier_solve(const ConvexProgram& prog, const Eigen::VectorXd& x0,
                            const BarrierOptions& options);

/// Phase I: minimizes s subject to f_i(x) <= s starting from an arbitrary
/// in-domain x0. Returns a strictly feasible point of `prog`, or nullopt when
/// the optimal s is not negative (no strictly feasible point exists).
std::optional<Eigen::VectorXd> find_strictly_feasible(const ConvexProgram& prog,
                                                      const Eigen::VectorXd& x0,
                                                      const BarrierOptions& options);

/// KKT residual of (x, duals): max of the stationarity infinity-norm, the
/// largest complementarity product and the largest constraint violation.
double kkt_residual(const ConvexProgram& prog, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& duals);

} // namespace physi

#endif
