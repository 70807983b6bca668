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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include "physi/allocation.hpp"
#include "physi/channel_io.hpp"
#include "physi/dc_solver.hpp"
#include "physi/errors.hpp"
#include "physi/experiment.hpp"
#include "physi/gsvd.hpp"
#include "physi/random.hpp"
#include "physi/rates.hpp"
#include "physi/region.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace physi;
using Eigen::Index;
namespace fs = std::filesystem;

struct Dims {
    std::size_t nt, nb, ne;
    const char* row;
};

// One triple per configuration row.
constexpr std::array<Dims, 5> kConfigs{{
    {3, 4, 2, "C1"},
    {3, 2, 4, "C2"},
    {3, 4, 3, "C3"},
    {4, 2, 3, "C4"},
    {4, 2, 2, "C5"},
}};

constexpr double kPower = 100.0; // 20 dB

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Outcome {
    bool pass = true;
    std::string detail;
};

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m)
{
    return m.size() == 0 ? 0.0 : static_cast<double>(m.cwiseAbs().maxCoeff());
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// Feasible (r_ms, scheme) drawn for a channel pair: a random scheme and a QoMS
// target up to 60% of a loose multicast bound of that scheme.
struct DrawnInstance {
    GsvdFactors factors;
    MessageAllocation alloc;
    double r_ms = 0.0;
};

std::optional<DrawnInstance> draw_instance(const Dims& dims, std::uint64_t seed, CounterRng& rng)
{
    DrawnInstance out;
    const ChannelPair pair = generate_channels(dims.nt, dims.nb, dims.ne, seed);
    out.factors = gsvd(pair);
    const SubchannelPartition part = classify_subchannels(out.factors);
    if (!check_feasibility(out.factors, part).phy_si_feasible()) return std::nullopt;
    const SchemeSet schemes = enumerate_schemes(out.factors, part);
    std::vector<std::size_t> useful;
    for (std::size_t k = 0; k < schemes.size(); ++k)
        if (schemes.schemes[k].n() > 0) useful.push_back(k);
    if (useful.empty()) return std::nullopt;
    out.alloc = schemes.schemes[useful[rng.next_u64() % useful.size()]];
    double bound = std::numeric_limits<double>::infinity();
    {
        double r1 = 0.0;
        double r2 = 0.0;
        for (auto i : out.alloc.gamma0) {
            const auto j = static_cast<Index>(i);
            r1 += std::log2(1.0 + kPower * out.factors.c_sq(j) / out.factors.a_col_norm_sq(j));
            r2 += std::log2(1.0 + kPower * out.factors.d_sq(j) / out.factors.a_col_norm_sq(j));
        }
        bound = std::min(r1, r2);
    }
    out.r_ms = out.alloc.m() == 0 ? 0.0 : 0.6 * rng.uniform() * bound;
    return out;
}

// ---- 1 -------------------------------------------------------------------
Outcome gsvd_correctness()
{
    Outcome o;
    Stopwatch clock;
    double worst_res = 0.0;
    double worst_unit = 0.0;
    double worst_cs = 0.0;
    std::size_t order_violations = 0;
    std::size_t pairs = 0;
    for (const auto& dims : kConfigs)
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const ChannelPair pair = generate_channels(dims.nt, dims.nb, dims.ne, 1000 + seed);
            const GsvdFactors f = gsvd(pair);
            ++pairs;
            const GsvdResiduals r = reconstruction_residuals(pair, f);
            worst_res = std::max({worst_res, r.h1, r.h2});
            const auto nb = static_cast<Index>(dims.nb);
            const auto ne = static_cast<Index>(dims.ne);
            worst_unit = std::max(worst_unit, max_abs(f.psi_r.adjoint() * f.psi_r -
                                                      Eigen::MatrixXcd::Identity(nb, nb)));
            worst_unit = std::max(worst_unit, max_abs(f.psi_e.adjoint() * f.psi_e -
                                                      Eigen::MatrixXcd::Identity(ne, ne)));
            const RMatrix c = f.c_matrix();
            const RMatrix d = f.d_matrix();
            const auto q = static_cast<Index>(f.q);
            worst_cs = std::max(worst_cs, max_abs(c.transpose() * c + d.transpose() * d -
                                                      Eigen::MatrixXd::Identity(q, q)));
            for (Index i = 0; i < q; ++i) {
                if (f.c_diag(i) < 0.0 || f.c_diag(i) > 1.0 || f.d_diag(i) < 0.0 || f.d_diag(i) > 1.0)
                    ++order_violations;
                if (i > 0 && (f.c_diag(i) < f.c_diag(i - 1) || f.d_diag(i) > f.d_diag(i - 1)))
                    ++order_violations;
            }
        }
    const double elapsed = clock.seconds();
    o.pass = pairs == 100 && worst_res <= 1e-8 && worst_unit <= 1e-10 && worst_cs <= 1e-10 &&
             order_violations == 0 && elapsed < 5.0;
    o.detail = std::to_string(pairs) + " pairs, residual " + fmt(worst_res) + " (<= 1e-8), unitarity " +
               fmt(worst_unit) + ", C'C+D'D-I " + fmt(worst_cs) + " (<= 1e-10), ordering violations " +
               std::to_string(order_violations) + ", " + fmt(elapsed) + " s (< 5 s)";
    return o;
}

// ---- 2 -------------------------------------------------------------------
Outcome subchannel_counts()
{
    Outcome o;
    std::size_t checked = 0;
    std::size_t mismatches = 0;
    for (const auto& dims : kConfigs)
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const ChannelPair pair = generate_channels(dims.nt, dims.nb, dims.ne, 2000 + seed);
            const SubchannelPartition part = classify_subchannels(gsvd(pair));
            const SubchannelCounts want = expected_subchannel_counts(dims.nt, dims.nb, dims.ne);
            const bool row_ok = std::find(want.configurations.begin(), want.configurations.end(),
                                          dims.row) != want.configurations.end();
            ++checked;
            if (!row_ok || part.cc.size() != want.cc || part.pc1.size() != want.pc1 ||
                part.pc2.size() != want.pc2)
                ++mismatches;
        }
    const auto c4 = expected_subchannel_counts(4, 2, 3);
    const bool example = c4.cc == 1 && c4.pc1 == 1 && c4.pc2 == 2;
    o.pass = checked == 100 && mismatches == 0 && example;
    o.detail = std::to_string(checked) + " pairs, " + std::to_string(mismatches) +
               " mismatches, (4,2,3) -> " + std::to_string(c4.cc) + "/" + std::to_string(c4.pc1) + "/" +
               std::to_string(c4.pc2);
    return o;
}

// ---- 3 -------------------------------------------------------------------
Outcome rate_formula_equivalence()
{
    Outcome o;
    CounterRng rng(3);
    double worst = 0.0;
    std::size_t triples = 0;
    for (std::uint64_t seed = 1; triples < 50; ++seed) {
        const Dims& dims = kConfigs[seed % kConfigs.size()];
        const ChannelPair pair = generate_channels(dims.nt, dims.nb, dims.ne, 3000 + seed);
        const GsvdFactors f = gsvd(pair);
        // Any partition of the subchannels, not only pruned schemes.
        MessageAllocation alloc;
        for (std::size_t i = 0; i < f.q; ++i) {
            switch (rng.next_u64() % 3) {
            case 0: alloc.gamma0.push_back(i); break;
            case 1: alloc.gammac.push_back(i); break;
            default: alloc.discarded.push_back(i); break;
            }
        }
        RVector p0(static_cast<Index>(alloc.m()));
        RVector pc(static_cast<Index>(alloc.n()));
        for (Index j = 0; j < p0.size(); ++j)
            p0(j) = rng.uniform() * kPower / f.a_col_norm_sq(static_cast<Index>(alloc.gamma0[j]));
        for (Index j = 0; j < pc.size(); ++j)
            pc(j) = rng.uniform() * kPower / f.a_col_norm_sq(static_cast<Index>(alloc.gammac[j]));
        const CovarianceRates cov =
            covariance_rates(pair, subchannel_covariance(f, alloc.gamma0, p0),
                             subchannel_covariance(f, alloc.gammac, pc));
        const auto [r1, r2] = multicast_rates(f, alloc, p0);
        worst = std::max(worst, std::abs(cov.rc - secrecy_rate(f, alloc, pc)));
        worst = std::max(worst, std::abs(cov.r0_bound - std::min(r1, r2)));
        ++triples;
    }
    o.pass = worst <= 1e-8;
    o.detail = std::to_string(triples) + " triples, max |subchannel - covariance| " + fmt(worst) +
               " (<= 1e-8)";
    return o;
}

// ---- 4 -------------------------------------------------------------------
Outcome surrogate_majorization()
{
    Outcome o;
    CounterRng rng(4);
    double worst_below = 0.0;
    double worst_above = 0.0;
    double worst_equal = 0.0;
    std::size_t points = 0;
    for (std::uint64_t seed = 1; points < 1000; ++seed) {
        const Dims& dims = kConfigs[seed % kConfigs.size()];
        const GsvdFactors f = gsvd(generate_channels(dims.nt, dims.nb, dims.ne, 4000 + seed));
        for (int rep = 0; rep < 10 && points < 1000; ++rep, ++points) {
            MessageAllocation alloc;
            for (std::size_t i = 0; i < f.q; ++i)
                (rng.uniform() < 0.5 ? alloc.gammac : alloc.gamma0).push_back(i);
            SubproblemInstance inst = make_instance(f, alloc, 0.0, kPower);
            RVector pc(static_cast<Index>(alloc.n()));
            for (Index n = 0; n < pc.size(); ++n) {
                inst.pc_ref(n) = rng.uniform() * kPower / inst.a_conf(n);
                pc(n) = rng.uniform() * kPower / inst.a_conf(n);
            }
            const double gap = true_objective(inst, pc) - surrogate_objective(inst, pc);
            worst_below = std::max(worst_below, gap);
            worst_above = std::max(worst_above, -gap);
            worst_equal = std::max(worst_equal, std::abs(surrogate_objective(inst, inst.pc_ref) -
                                                         true_objective(inst, inst.pc_ref)));
        }
    }
    o.pass = worst_below <= 1e-10 && worst_equal <= 1e-10;
    o.detail = std::to_string(points) + " points, max(true - g) " + fmt(worst_below) +
               ", max |g - true| at pc_ref " + fmt(worst_equal) + " (tol 1e-10); reverse bound max(g - true) " +
               fmt(worst_above);
    return o;
}

// ---- 5 -------------------------------------------------------------------
Outcome dc_ascent_and_stationarity()
{
    Outcome o;
    CounterRng rng(5);
    DcConfig cfg;
    cfg.epsilon = 1e-6;
    std::size_t instances = 0;
    std::size_t non_monotone = 0;
    std::size_t not_converged = 0;
    std::size_t max_iters = 0;
    double worst_gain = -1.0;
    for (std::uint64_t seed = 1; instances < 50; ++seed) {
        const Dims& dims = kConfigs[seed % 4]; // C1..C4 are feasible in general
        const auto drawn = draw_instance(dims, 5000 + seed, rng);
        if (!drawn) continue;
        const DcResult res = dc_solve(drawn->factors, drawn->alloc, drawn->r_ms, kPower, cfg);
        if (res.infeasible()) continue;
        ++instances;
        for (std::size_t i = 1; i < res.trace.size(); ++i)
            if (res.trace[i].true_objective < res.trace[i - 1].true_objective - 1e-9) {
                ++non_monotone;
                break;
            }
        if (!res.converged || res.iterations() > 100) ++not_converged;
        max_iters = std::max(max_iters, res.iterations());
        const SubproblemInstance inst = make_instance(drawn->factors, drawn->alloc, drawn->r_ms, kPower);
        worst_gain = std::max(worst_gain, relinearized_gain(inst, res.solution->pc, cfg));
    }
    o.pass = non_monotone == 0 && not_converged == 0 && worst_gain < cfg.epsilon;
    o.detail = std::to_string(instances) + " instances, non-monotone " + std::to_string(non_monotone) +
               ", unconverged " + std::to_string(not_converged) + ", max iterations " +
               std::to_string(max_iters) + " (<= 100), worst re-linearized gain " + fmt(worst_gain) +
               " (< 1e-6)";
    return o;
}

// ---- 6 -------------------------------------------------------------------
Outcome solver_vs_oracle()
{
    Outcome o;
    CounterRng rng(6);
    std::size_t instances = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 1; instances < 25; ++seed) {
        const Dims& dims = kConfigs[seed % 4];
        const auto drawn = draw_instance(dims, 6000 + seed, rng);
        if (!drawn || drawn->alloc.m() + drawn->alloc.n() > 3) continue;
        const DcResult res = dc_solve(drawn->factors, drawn->alloc, drawn->r_ms, kPower);
        const SubproblemInstance inst = make_instance(drawn->factors, drawn->alloc, drawn->r_ms, kPower);
        const auto grid = grid_oracle(inst, 400);
        if (res.infeasible() || !grid) continue;
        ++instances;
        worst = std::min(worst, res.solution->secrecy_rate - *grid);
    }
    o.pass = worst >= -1e-2;
    o.detail = std::to_string(instances) + " instances with M + N <= 3, min(dc - grid400) " + fmt(worst) +
               " bits (>= -1e-2)";
    return o;
}

// ---- 7 -------------------------------------------------------------------
Outcome weak_common_channels_never_help()
{
    Outcome o;
    std::size_t seeds = 0;
    std::size_t comparisons = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::uint64_t seed = 1; seeds < 10; ++seed) {
        const ChannelPair pair = generate_channels(2, 2, 2, 7000 + seed);
        const GsvdFactors f = gsvd(pair);
        const SubchannelPartition part = classify_subchannels(f);
        if (!check_feasibility(f, part).phy_si_feasible()) continue;
        std::vector<std::size_t> weak;
        for (auto i : part.cc)
            if (!(f.c_sq(static_cast<Index>(i)) > f.d_sq(static_cast<Index>(i)) + kGainTieTolerance))
                weak.push_back(i);
        if (weak.empty()) continue;
        ++seeds;
        const SchemeSet respecting = enumerate_schemes(f, part);

        // Every assignment of the q subchannels to {multicast, confidential, discarded}
        // that puts at least one weak common channel into the confidential set.
        std::vector<MessageAllocation> violating;
        std::size_t total = 1;
        for (std::size_t i = 0; i < f.q; ++i) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            MessageAllocation a;
            std::size_t c = code;
            for (std::size_t i = 0; i < f.q; ++i, c /= 3) {
                if (c % 3 == 0) a.gamma0.push_back(i);
                else if (c % 3 == 1) a.gammac.push_back(i);
                else a.discarded.push_back(i);
            }
            const bool uses_weak = std::any_of(a.gammac.begin(), a.gammac.end(), [&](std::size_t i) {
                return std::find(weak.begin(), weak.end(), i) != weak.end();
            });
            if (uses_weak) violating.push_back(std::move(a));
        }

        double r_max = 0.0;
        for (auto i : part.cc) {
            const auto j = static_cast<Index>(i);
            r_max += std::log2(1.0 + kPower * std::min(f.c_sq(j), f.d_sq(j)) / f.a_col_norm_sq(j));
        }
        for (double frac : {0.0, 0.25, 0.5, 0.75}) {
            const double r_ms = frac * r_max;
            auto best_of = [&](const std::vector<MessageAllocation>& set) {
                std::optional<double> best;
                for (const auto& a : set) {
                    const auto v = grid_oracle(make_instance(f, a, r_ms, kPower), 400);
                    if (v && (!best || *v > *best)) best = v;
                }
                return best;
            };
            const auto good = best_of(respecting.schemes);
            const auto bad = best_of(violating);
            if (!bad) continue;
            ++comparisons;
            worst = std::max(worst, *bad - (good ? *good : -std::numeric_limits<double>::infinity()));
        }
    }
    o.pass = seeds == 10 && comparisons > 0 && worst <= 1e-12;
    o.detail = std::to_string(seeds) + " seeds with a weak common channel, " + std::to_string(comparisons) +
               " grid comparisons, max(violating - respecting) " + fmt(worst) + " bits (<= 0)";
    return o;
}

// ---- 8 -------------------------------------------------------------------
Outcome region_structure()
{
    Outcome o;
    std::size_t failures = 0;
    double slowest = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    double worst_rise = 0.0;
    std::string why;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const ChannelPair pair = generate_channels(3, 4, 3, 8000 + seed);
        Stopwatch clock;
        const RateRegion g = sweep_region(pair, kPower, 0.1);
        slowest = std::max(slowest, clock.seconds());
        const RateRegion t = tdma_baseline(pair, kPower, 0.1);

        bool ok = true;
        bool strict = false;
        for (std::size_t k = 0; k < t.points.size(); ++k) {
            const auto rg = g.rate_at(k);
            if (!rg) {
                ok = false;
                why = "GSVD sweep shorter than TDMA at seed " + std::to_string(seed);
                break;
            }
            const double margin = *rg - t.points[k].r_c;
            worst_margin = std::min(worst_margin, margin);
            if (margin < 0.0) ok = false;
            const bool interior = k > 0 && k + 1 < t.points.size();
            if (interior && margin > 0.0) strict = true;
        }
        for (std::size_t k = 1; k < g.points.size(); ++k)
            worst_rise = std::max(worst_rise, g.points[k].r_c - g.points[k - 1].r_c);
        if (!strict) ok = false;
        if (!ok) ++failures;
    }
    o.pass = failures == 0 && worst_rise <= 1e-6 && slowest < 60.0;
    o.detail = "10 seeds, failing seeds " + std::to_string(failures) + ", min(GSVD - TDMA) " +
               fmt(worst_margin) + ", max r_c rise " + fmt(worst_rise) + " (<= 1e-6), slowest sweep " +
               fmt(slowest) + " s (< 60 s)" + (why.empty() ? "" : ", " + why);
    return o;
}

// ---- 9 -------------------------------------------------------------------
Outcome grid_reference_dominance()
{
    Outcome o;
    std::size_t seeds = 0;
    std::size_t points = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::size_t missing = 0;
    for (std::uint64_t seed = 1; seeds < 10; ++seed) {
        const ChannelPair pair = generate_channels(2, 2, 2, 9000 + seed);
        RateRegion g;
        try {
            g = sweep_region(pair, kPower, 0.1);
        } catch (const PhySiInfeasible&) {
            continue;
        }
        ++seeds;
        GridReferenceOptions opts;
        opts.dictionary = Dictionary::Full;
        opts.seed = seed;
        opts.delta = 0.1;
        opts.extra_pairs = region_covariances(gsvd(pair), g);
        const RateRegion ref = grid_reference_region(pair, kPower, 11, opts);
        for (std::size_t k = 0; k < g.points.size(); ++k) {
            ++points;
            const auto rr = ref.rate_at(k);
            if (!rr) {
                ++missing;
                continue;
            }
            worst = std::min(worst, *rr - g.points[k].r_c);
        }
    }
    o.pass = missing == 0 && worst >= -1e-9;
    o.detail = std::to_string(seeds) + " seeds, " + std::to_string(points) +
               " GSVD points, min(frontier - GSVD) " + fmt(worst) + " (>= -1e-9), missing " +
               std::to_string(missing);
    return o;
}

// ---- 10 ------------------------------------------------------------------
std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome reproducibility()
{
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "physi_acceptance_repro";
    fs::remove_all(root);
    std::size_t compared = 0;
    std::size_t differing = 0;
    for (const Dims dims : {Dims{3, 4, 3, "C3"}, Dims{2, 2, 2, "C3"}}) {
        std::vector<fs::path> dirs;
        for (int run = 0; run < 2; ++run) {
            ExperimentConfig cfg;
            cfg.nt = dims.nt;
            cfg.nb = dims.nb;
            cfg.ne = dims.ne;
            cfg.power = {20.0, PowerUnit::Decibel};
            cfg.seed = 42;
            cfg.trials = 2;
            cfg.grid_reference.grid = 6;
            cfg.output_dir = (root / (std::to_string(dims.nt) + "_run" + std::to_string(run))).string();
            run_experiment(cfg);
            dirs.emplace_back(cfg.output_dir);
        }
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            if (entry.path().extension() != ".csv") continue;
            ++compared;
            const fs::path other = dirs[1] / entry.path().filename();
            if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
        }
    }
    fs::remove_all(root);
    o.pass = compared >= 4 && differing == 0;
    o.detail = std::to_string(compared) + " CSV files compared across two runs, " +
               std::to_string(differing) + " differ";
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"GSVD correctness", gsvd_correctness},
        {"subchannel counts per configuration", subchannel_counts},
        {"subchannel rates equal covariance rates", rate_formula_equivalence},
        {"surrogate majorizes true objective", surrogate_majorization},
        {"DC ascent and stationarity", dc_ascent_and_stationarity},
        {"DC solver vs grid oracle", solver_vs_oracle},
        {"weak common channels never help secrecy", weak_common_channels_never_help},
        {"GSVD region dominates TDMA", region_structure},
        {"grid reference dominates GSVD region", grid_reference_dominance},
        {"bitwise reproducible CSV output", reproducibility},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome out;
        Stopwatch clock;
        try {
            out = criteria[i].run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        if (!out.pass) ++failed;
        std::printf("[%s] %2zu %s: %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    out.detail.c_str(), clock.seconds());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
