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

#include "physi/region.hpp"
#include "physi/barrier.hpp"
#include "physi/errors.hpp"
#include "physi/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace physi {

namespace {

using Complex = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLn2 = std::numbers::ln2;

// A frontier point at r_ms counts candidates whose multicast rate is this
// close below r_ms.
constexpr double kFrontierSlack = 1e-9;

struct Prepared {
    GsvdFactors factors;
    SubchannelPartition partition;
};

Prepared prepare(const ChannelPair& pair, double tolerance = 1e-9)
{
    Prepared p;
    p.factors = gsvd(pair);
    p.partition = classify_subchannels(p.factors, tolerance);
    const FeasibilityReport report = check_feasibility(p.factors, p.partition);
    if (!report.phy_si_feasible()) {
        const SubchannelCounts counts = expected_subchannel_counts(pair.nt(), pair.nb(), pair.ne());
        std::ostringstream msg;
        msg << "GSVD precoding cannot serve both messages (Nt=" << pair.nt() << ", Nb=" << pair.nb()
            << ", Ne=" << pair.ne();
        for (const auto& c : counts.configurations) msg << ", configuration " << c;
        msg << "): " << report.describe();
        throw PhySiInfeasible(msg.str());
    }
    return p;
}

// min(sum log2(1 + P c^2 / a), sum log2(1 + P d^2 / a)) over the common channels.
double multicast_upper_bound(const GsvdFactors& f, const SubchannelPartition& part, double p_budget)
{
    double r1 = 0.0;
    double r2 = 0.0;
    for (auto i : part.cc) {
        const auto idx = static_cast<Index>(i);
        const double p = p_budget / f.a_col_norm_sq(idx);
        r1 += std::log2(1.0 + p * f.c_sq(idx));
        r2 += std::log2(1.0 + p * f.d_sq(idx));
    }
    return std::min(r1, r2);
}

// max t  s.t.  t <= sum log2(1 + p c^2), t <= sum log2(1 + p d^2), a.p <= P, p >= 0
// over z = [p; t].
class MaxMinMulticast final : public ConvexProgram {
public:
    MaxMinMulticast(RVector c2, RVector d2, RVector a, double p_budget) :
        c2_(std::move(c2)), d2_(std::move(d2)), a_(std::move(a)), budget_(p_budget),
        n_(c2_.size())
    {
    }

    Index dimension() const override { return n_ + 1; }
    Index constraint_count() const override { return 3 + n_; }
    bool in_domain(const VectorXd& z) const override
    {
        if (!z.allFinite()) return false;
        for (Index j = 0; j < n_; ++j)
            if (1.0 + z(j) * std::max(c2_(j), d2_(j)) <= 0.0) return false;
        return true;
    }
    double objective(const VectorXd& z) const override { return -z(n_); }
    void objective_derivatives(const VectorXd&, double scale, VectorXd& grad,
                               MatrixXd&) const override
    {
        grad(n_) -= scale;
    }
    double constraint(Index i, const VectorXd& z) const override
    {
        if (i < 2) return z(n_) - rate(i == 0 ? c2_ : d2_, z);
        if (i == 2) return a_.dot(z.head(n_)) - budget_;
        return -z(i - 3);
    }
    void constraint_gradient(Index i, const VectorXd& z, VectorXd& grad) const override
    {
        if (i < 2) {
            const RVector& g = i == 0 ? c2_ : d2_;
            for (Index j = 0; j < n_; ++j) grad(j) -= g(j) / (kLn2 * (1.0 + z(j) * g(j)));
            grad(n_) += 1.0;
        } else if (i == 2) {
            grad.head(n_) += a_;
        } else {
            grad(i - 3) -= 1.0;
        }
    }
    void add_constraint_hessian(Index i, const VectorXd& z, double scale,
                                MatrixXd& hess) const override
    {
        if (i >= 2) return;
        const RVector& g = i == 0 ? c2_ : d2_;
        for (Index j = 0; j < n_; ++j) {
            const double denom = 1.0 + z(j) * g(j);
            hess(j, j) += scale * g(j) * g(j) / (kLn2 * denom * denom);
        }
    }

    VectorXd start_point() const
    {
        VectorXd z(n_ + 1);
        for (Index j = 0; j < n_; ++j) z(j) = budget_ / (2.0 * static_cast<double>(n_) * a_(j));
        z(n_) = std::min(rate(c2_, z), rate(d2_, z)) - 1.0;
        return z;
    }

private:
    double rate(const RVector& g, const VectorXd& z) const
    {
        double r = 0.0;
        for (Index j = 0; j < n_; ++j) r += std::log2(1.0 + z(j) * g(j));
        return r;
    }

    RVector c2_;
    RVector d2_;
    RVector a_;
    double budget_;
    Index n_;
};

double best_secrecy_rate(const GsvdFactors& f, const SchemeSet& schemes, double p_budget,
                         const DcConfig& cfg)
{
    double best = 0.0;
    for (const auto& alloc : schemes.schemes) {
        const DcResult res = dc_solve(f, alloc, 0.0, p_budget, cfg);
        if (res.solution) best = std::max(best, res.solution->secrecy_rate);
    }
    return best;
}

double max_min_multicast(const GsvdFactors& f, const SubchannelPartition& part, double p_budget,
                         const DcConfig& cfg)
{
    const auto n = static_cast<Index>(part.cc.size());
    if (n == 0 || p_budget <= 0.0) return 0.0;
    RVector c2(n), d2(n), a(n);
    for (Index j = 0; j < n; ++j) {
        const auto i = static_cast<Index>(part.cc[static_cast<std::size_t>(j)]);
        c2(j) = f.c_sq(i);
        d2(j) = f.d_sq(i);
        a(j) = f.a_col_norm_sq(i);
    }
    const MaxMinMulticast prog(c2, d2, a, p_budget);
    const BarrierResult res = barrier_solve(prog, prog.start_point(), cfg.barrier);
    return res.x(n);
}

void append_number(std::ostream& out, double value)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    out.write(buf, end - buf);
}

CMatrix unitary_from(const CMatrix& gaussian)
{
    Eigen::HouseholderQR<CMatrix> qr(gaussian);
    const Index n = gaussian.rows();
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    // Phases of R's diagonal make the result Haar distributed.
    const CMatrix& r = qr.matrixQR();
    for (Index j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

struct DirectionSet {
    CMatrix v;
    bool exclusive = false;
};

// Enumerates every power assignment of one direction set on the grid and
// appends the resulting rate pairs.
void search_directions(const ChannelPair& pair, const DirectionSet& dirs, double p_budget,
                       std::size_t grid, std::vector<RatePair>& out)
{
    const Index k = dirs.v.cols();
    const Index nt = dirs.v.rows();
    std::vector<double> weight(static_cast<std::size_t>(k));
    for (Index j = 0; j < k; ++j) weight[static_cast<std::size_t>(j)] = dirs.v.col(j).squaredNorm();

    auto level = [&](Index col, std::size_t step) {
        if (grid <= 1) return 0.0;
        return p_budget / weight[static_cast<std::size_t>(col)] * static_cast<double>(step) /
               static_cast<double>(grid - 1);
    };

    // Per column: (multicast step, confidential step).
    std::vector<std::pair<std::size_t, std::size_t>> options;
    for (std::size_t s0 = 0; s0 < grid; ++s0)
        for (std::size_t sc = 0; sc < grid; ++sc)
            if (!dirs.exclusive || s0 == 0 || sc == 0) options.emplace_back(s0, sc);

    const double limit = p_budget * (1.0 + 1e-12);
    std::vector<std::size_t> pick(static_cast<std::size_t>(k), 0);
    for (;;) {
        double spent = 0.0;
        CMatrix q0 = CMatrix::Zero(nt, nt);
        CMatrix qc = CMatrix::Zero(nt, nt);
        for (Index j = 0; j < k; ++j) {
            const auto [s0, sc] = options[pick[static_cast<std::size_t>(j)]];
            const double p0 = level(j, s0);
            const double pc = level(j, sc);
            spent += (p0 + pc) * weight[static_cast<std::size_t>(j)];
            const CMatrix outer = dirs.v.col(j) * dirs.v.col(j).adjoint();
            if (p0 > 0.0) q0 += p0 * outer;
            if (pc > 0.0) qc += pc * outer;
        }
        if (spent <= limit) {
            const CovarianceRates r = covariance_rates(pair, q0, qc);
            out.push_back({r.r0_bound, r.rc});
        }
        Index j = 0;
        while (j < k) {
            auto& p = pick[static_cast<std::size_t>(j)];
            if (++p < options.size()) break;
            p = 0;
            ++j;
        }
        if (j == k) break;
    }
}

} // namespace

const char* to_string(RegionLabel label)
{
    switch (label) {
    case RegionLabel::Gsvd: return "GSVD";
    case RegionLabel::Tdma: return "TDMA";
    case RegionLabel::GridReference: return "GRID_REFERENCE";
    }
    return "UNKNOWN";
}

std::vector<double> RateRegion::switching_points() const
{
    std::vector<double> out;
    for (std::size_t k = 1; k < points.size(); ++k)
        if (points[k].scheme_id != points[k - 1].scheme_id) out.push_back(points[k].r_ms);
    return out;
}

std::optional<double> RateRegion::rate_at(std::size_t k) const
{
    if (k < points.size()) return points[k].r_c;
    return std::nullopt;
}

RateRegion sweep_region(const ChannelPair& pair, double p_budget, double delta,
                        const DcConfig& cfg, const SweepOptions& options)
{
    if (!(delta > 0.0)) throw std::invalid_argument("sweep_region: delta must be positive");
    if (!(p_budget > 0.0)) throw std::invalid_argument("sweep_region: power budget must be positive");
    const Prepared prep = prepare(pair, options.classify_tolerance);
    const GsvdFactors& f = prep.factors;

    SchemeSet schemes = enumerate_schemes(f, prep.partition);
    const double cap = multicast_upper_bound(f, prep.partition, p_budget);

    RateRegion region;
    region.label = RegionLabel::Gsvd;
    region.delta = delta;
    region.p_budget = p_budget;
    region.metrics["multicast_upper_bound"] = cap;
    region.metrics["schemes_enumerated"] = static_cast<double>(schemes.size());

    std::vector<MessageAllocation> removed;
    std::vector<std::size_t> removed_ids;

    for (std::size_t step = 0; !schemes.empty(); ++step) {
        const double r_ms = static_cast<double>(step) * delta;
        if (r_ms > cap) {
            region.notes.push_back("sweep capped at the full-power multicast bound");
            break;
        }

        RegionPoint point;
        point.r_ms = r_ms;
        std::vector<std::size_t> infeasible;
        std::optional<DcResult> winner;
        std::size_t winner_pos = 0;

        for (std::size_t k = 0; k < schemes.size(); ++k) {
            try {
                DcResult res = dc_solve(f, schemes.schemes[k], r_ms, p_budget, cfg);
                if (res.infeasible()) {
                    infeasible.push_back(k);
                    continue;
                }
                if (!winner || res.solution->secrecy_rate > winner->solution->secrecy_rate) {
                    winner = std::move(res);
                    winner_pos = k;
                }
            } catch (const NumericalFailure& e) {
                std::ostringstream msg;
                msg << "scheme " << schemes.ids[k] << ": " << e.what();
                point.failures.push_back(msg.str());
            }
        }

        if (options.verify_removals) {
            for (std::size_t k = 0; k < removed.size(); ++k) {
                const DcResult again = dc_solve(f, removed[k], r_ms, p_budget, cfg);
                if (!again.infeasible()) {
                    std::ostringstream msg;
                    msg << "removed scheme " << removed_ids[k] << " feasible again at r_ms = " << r_ms;
                    region.notes.push_back(msg.str());
                }
            }
        }

        if (winner) {
            point.scheme_id = schemes.ids[winner_pos];
            point.r_c = clean_rate(std::max(0.0, winner->solution->secrecy_rate));
            point.iterations = winner->iterations();
            point.allocation = schemes.schemes[winner_pos];
            point.p0 = winner->solution->p0;
            point.pc = winner->solution->pc;
        }

        for (auto it = infeasible.rbegin(); it != infeasible.rend(); ++it) {
            removed.push_back(schemes.schemes[*it]);
            removed_ids.push_back(schemes.ids[*it]);
            schemes = remove_scheme(schemes, *it);
        }
        point.feasible_schemes_remaining = schemes.size();

        if (!winner) {
            if (!point.failures.empty()) {
                // Every remaining scheme failed numerically; keep the failures visible.
                for (auto& msg : point.failures) region.notes.push_back(std::move(msg));
                region.notes.push_back("sweep stopped: no scheme solved at r_ms = " +
                                       std::to_string(r_ms));
            }
            break;
        }
        region.points.push_back(std::move(point));
    }

    const auto switches = region.switching_points();
    region.metrics["switching_points"] = static_cast<double>(switches.size());
    for (double r : switches) {
        std::ostringstream msg;
        msg << "winning scheme changes at r_ms = " << r;
        region.notes.push_back(msg.str());
    }
    return region;
}

TdmaEndpoints tdma_endpoints(const ChannelPair& pair, double p_budget, const DcConfig& cfg)
{
    if (!(p_budget > 0.0)) throw std::invalid_argument("tdma_endpoints: power budget must be positive");
    const Prepared prep = prepare(pair);
    TdmaEndpoints ends;
    ends.multicast_max = max_min_multicast(prep.factors, prep.partition, p_budget, cfg);
    ends.secrecy_max = best_secrecy_rate(prep.factors, enumerate_schemes(prep.factors, prep.partition),
                                         p_budget, cfg);
    return ends;
}

std::pair<double, double> tdma_point(const TdmaEndpoints& ends, double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("tdma_point: alpha outside [0, 1]");
    // Each message only owns one of the two equal slots, so both rates are halved.
    return {0.5 * alpha * ends.multicast_max, 0.5 * (1.0 - alpha) * ends.secrecy_max};
}

RateRegion tdma_baseline(const ChannelPair& pair, double p_budget, double delta, const DcConfig& cfg)
{
    if (!(delta > 0.0)) throw std::invalid_argument("tdma_baseline: delta must be positive");
    const TdmaEndpoints ends = tdma_endpoints(pair, p_budget, cfg);

    RateRegion region;
    region.label = RegionLabel::Tdma;
    region.delta = delta;
    region.p_budget = p_budget;
    region.metrics["multicast_max"] = ends.multicast_max;
    region.metrics["secrecy_max"] = ends.secrecy_max;
    const double r0_max = tdma_point(ends, 1.0).first;
    region.metrics["halved_multicast"] = r0_max;
    region.metrics["halved_secrecy"] = tdma_point(ends, 0.0).second;

    for (std::size_t k = 0;; ++k) {
        const double r_ms = static_cast<double>(k) * delta;
        if (r_ms > r0_max) break;
        const double alpha = r0_max > 0.0 ? r_ms / r0_max : 1.0;
        RegionPoint point;
        point.r_ms = r_ms;
        point.r_c = clean_rate(tdma_point(ends, alpha).second);
        region.points.push_back(std::move(point));
        if (r0_max <= 0.0) break;
    }
    return region;
}

std::vector<RatePair> pareto_frontier(std::vector<RatePair> candidates)
{
    std::sort(candidates.begin(), candidates.end(), [](const RatePair& a, const RatePair& b) {
        return a.r0 != b.r0 ? a.r0 > b.r0 : a.rc > b.rc;
    });
    std::vector<RatePair> front;
    double best_rc = -std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        if (c.rc > best_rc) {
            front.push_back(c);
            best_rc = c.rc;
        }
    }
    std::reverse(front.begin(), front.end());
    return front;
}

RateRegion grid_reference_region(const ChannelPair& pair, double p_budget, std::size_t grid,
                                 const GridReferenceOptions& options)
{
    if (pair.nt() > 2 || pair.nb() > 2 || pair.ne() > 2) {
        std::ostringstream msg;
        msg << "grid_reference_region: needs Nt, Nb, Ne <= 2, got " << pair.nt() << ", " << pair.nb()
            << ", " << pair.ne();
        throw DimensionTooLarge(msg.str());
    }
    if (!(options.delta > 0.0)) throw std::invalid_argument("grid_reference_region: delta must be positive");
    if (p_budget < 0.0) throw std::invalid_argument("grid_reference_region: negative power budget");

    RateRegion region;
    region.label = RegionLabel::GridReference;
    region.delta = options.delta;
    region.p_budget = p_budget;

    const auto nt = static_cast<Index>(pair.nt());
    std::vector<RatePair> candidates;
    if (p_budget == 0.0) {
        candidates.push_back({0.0, 0.0});
    } else {
        std::vector<DirectionSet> dictionary;
        const GsvdFactors f = gsvd(pair);
        if (options.dictionary == Dictionary::GsvdOnly) {
            dictionary.push_back({f.a, true});
        } else {
            // Superposition on the GSVD directions contains every exclusive assignment.
            dictionary.push_back({f.a, false});
            Eigen::JacobiSVD<CMatrix> s1(pair.h1(), Eigen::ComputeFullV);
            Eigen::JacobiSVD<CMatrix> s2(pair.h2(), Eigen::ComputeFullV);
            dictionary.push_back({s1.matrixV(), false});
            dictionary.push_back({s2.matrixV(), false});
            CounterRng rng(options.seed);
            for (std::size_t u = 0; u < options.random_unitaries; ++u) {
                CMatrix g(nt, nt);
                for (Index j = 0; j < nt; ++j)
                    for (Index i = 0; i < nt; ++i) g(i, j) = rng.complex_normal();
                dictionary.push_back({unitary_from(g), false});
            }
        }
        for (const auto& dirs : dictionary) search_directions(pair, dirs, p_budget, grid, candidates);
    }
    for (const auto& extra : options.extra_pairs) {
        const CovarianceRates r = covariance_rates(pair, extra.q0, extra.qc);
        candidates.push_back({r.r0_bound, r.rc});
    }

    const std::vector<RatePair> front = pareto_frontier(candidates);
    region.metrics["candidates"] = static_cast<double>(candidates.size());
    region.metrics["frontier_size"] = static_cast<double>(front.size());

    for (std::size_t k = 0;; ++k) {
        const double r_ms = static_cast<double>(k) * options.delta;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& c : front)
            if (c.r0 >= r_ms - kFrontierSlack) best = std::max(best, c.rc);
        if (!std::isfinite(best)) break;
        RegionPoint point;
        point.r_ms = r_ms;
        point.r_c = clean_rate(std::max(0.0, best));
        region.points.push_back(std::move(point));
    }
    return region;
}

std::vector<CovariancePair> region_covariances(const GsvdFactors& f, const RateRegion& region)
{
    std::vector<CovariancePair> out;
    for (const auto& point : region.points) {
        if (!point.scheme_id) continue;
        out.push_back({subchannel_covariance(f, point.allocation.gamma0, point.p0),
                       subchannel_covariance(f, point.allocation.gammac, point.pc)});
    }
    return out;
}

void write_region_csv(std::ostream& out, const RateRegion& region)
{
    out << "r_ms,r_c,scheme_id,iterations,feasible_schemes_remaining\n";
    for (const auto& p : region.points) {
        append_number(out, p.r_ms);
        out << ',';
        append_number(out, p.r_c);
        out << ',';
        if (p.scheme_id) out << *p.scheme_id;
        out << ',' << p.iterations << ',' << p.feasible_schemes_remaining << '\n';
    }
}

} // namespace physi
