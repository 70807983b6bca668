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

// Command line front end. Exit codes: 0 success, 2 infeasible, 3 numerical
// failure, 4 configuration or input error, 1 anything else.

#include "physi/allocation.hpp"
#include "physi/channel_io.hpp"
#include "physi/dc_solver.hpp"
#include "physi/errors.hpp"
#include "physi/experiment.hpp"
#include "physi/gsvd.hpp"
#include "physi/region.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using json = nlohmann::json;
using namespace physi;

constexpr int kExitInfeasible = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitConfig = 4;

struct ChannelArgs {
    std::string file;
    std::size_t nt = 3;
    std::size_t nb = 4;
    std::size_t ne = 3;
    std::uint64_t seed = 1;
};

struct PowerArgs {
    std::optional<double> db;
    std::optional<double> linear;

    double value() const
    {
        if (linear) return PowerSpec{*linear, PowerUnit::Linear}.linear();
        if (db) return PowerSpec{*db, PowerUnit::Decibel}.linear();
        return PowerSpec{20.0, PowerUnit::Decibel}.linear();
    }
};

struct DcArgs {
    double epsilon = 1e-6;
    std::size_t max_iters = 100;
    bool no_boost = false;

    DcConfig config() const
    {
        DcConfig cfg;
        cfg.epsilon = epsilon;
        cfg.max_dc_iters = max_iters;
        cfg.boost = !no_boost;
        cfg.validate();
        return cfg;
    }
};

void add_channel_options(CLI::App* app, ChannelArgs& args)
{
    app->add_option("--channels", args.file, "Channel matrix file (default: generate)");
    app->add_option("--nt", args.nt, "Transmit antennas")->check(CLI::PositiveNumber);
    app->add_option("--nb", args.nb, "Antennas at receiver 1")->check(CLI::PositiveNumber);
    app->add_option("--ne", args.ne, "Antennas at receiver 2")->check(CLI::PositiveNumber);
    app->add_option("--seed", args.seed, "Channel seed");
}

void add_power_options(CLI::App* app, PowerArgs& args)
{
    auto* db = app->add_option("--power-db", args.db, "Power budget in dB (default 20)");
    auto* lin = app->add_option("--power-linear", args.linear, "Power budget, linear");
    db->excludes(lin);
}

void add_dc_options(CLI::App* app, DcArgs& args)
{
    app->add_option("--epsilon", args.epsilon, "DC stopping tolerance (bits)");
    app->add_option("--max-iters", args.max_iters, "DC iteration limit");
    app->add_flag("--no-boost", args.no_boost, "Plain DC iteration without the extrapolated step");
}

ChannelPair load_channels(const ChannelArgs& args)
{
    if (!args.file.empty()) return load_channel_pair(args.file);
    return generate_channels(args.nt, args.nb, args.ne, args.seed);
}

json vector_json(const RVector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json index_json(const IndexList& v)
{
    return json(v);
}

// Writes to `path`, or stdout when empty.
template <typename Writer>
void emit(const std::string& path, Writer&& writer)
{
    if (path.empty()) {
        writer(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    writer(out);
}

int cmd_gen(const ChannelArgs& ch, const std::string& out)
{
    const ChannelPair pair = generate_channels(ch.nt, ch.nb, ch.ne, ch.seed);
    emit(out, [&](std::ostream& o) { write_channel_pair(o, pair); });
    return 0;
}

int cmd_gsvd(const ChannelArgs& ch, const std::string& out)
{
    const ChannelPair pair = load_channels(ch);
    const GsvdFactors f = gsvd(pair);
    const SubchannelPartition part = classify_subchannels(f);
    const GsvdResiduals res = reconstruction_residuals(pair, f);
    const FeasibilityReport feas = check_feasibility(f, part);
    const SubchannelCounts counts = expected_subchannel_counts(pair.nt(), pair.nb(), pair.ne());

    json j;
    j["nt"] = pair.nt();
    j["nb"] = pair.nb();
    j["ne"] = pair.ne();
    j["q"] = f.q;
    j["c"] = vector_json(f.c_diag);
    j["d"] = vector_json(f.d_diag);
    j["a_column_norm_sq"] = vector_json(f.a_col_norm_sq);
    j["residual_h1"] = res.h1;
    j["residual_h2"] = res.h2;
    j["cc"] = index_json(part.cc);
    j["pc1"] = index_json(part.pc1);
    j["pc2"] = index_json(part.pc2);
    j["configurations"] = counts.configurations;
    j["feasible"] = feas.phy_si_feasible();
    if (!feas.phy_si_feasible()) j["reason"] = feas.describe();
    emit(out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    return 0;
}

int cmd_solve(const ChannelArgs& ch, const PowerArgs& pw, const DcArgs& dc, double r_ms,
              const std::string& out)
{
    const ChannelPair pair = load_channels(ch);
    const DcConfig cfg = dc.config();
    const GsvdFactors f = gsvd(pair);
    const SubchannelPartition part = classify_subchannels(f);
    const FeasibilityReport feas = check_feasibility(f, part);
    const SubchannelCounts counts = expected_subchannel_counts(pair.nt(), pair.nb(), pair.ne());
    if (!feas.phy_si_feasible()) {
        std::string where;
        for (const auto& c : counts.configurations) where += " configuration " + c;
        throw PhySiInfeasible("GSVD precoding cannot serve both messages (" + where + "): " +
                              feas.describe());
    }
    const double p = pw.value();
    const SchemeSet schemes = enumerate_schemes(f, part);

    std::optional<std::size_t> best;
    std::optional<DcResult> best_result;
    for (std::size_t k = 0; k < schemes.size(); ++k) {
        DcResult r = dc_solve(f, schemes.schemes[k], r_ms, p, cfg);
        if (r.infeasible()) continue;
        if (!best_result || r.solution->secrecy_rate > best_result->solution->secrecy_rate) {
            best = k;
            best_result = std::move(r);
        }
    }
    if (!best) throw PhySiInfeasible("no allocation scheme meets the multicast rate " + format_double(r_ms));

    const MessageAllocation& alloc = schemes.schemes[*best];
    const PowerSolution& sol = *best_result->solution;
    json j;
    j["r_ms"] = r_ms;
    j["power_linear"] = p;
    j["scheme_id"] = schemes.ids[*best];
    j["gamma0"] = index_json(alloc.gamma0);
    j["gammac"] = index_json(alloc.gammac);
    j["discarded"] = index_json(alloc.discarded);
    j["p0"] = vector_json(sol.p0);
    j["pc"] = vector_json(sol.pc);
    j["secrecy_rate"] = sol.secrecy_rate;
    j["multicast_rate_1"] = sol.multicast_rate_1;
    j["multicast_rate_2"] = sol.multicast_rate_2;
    j["total_power"] = sol.total_power;
    j["dc_iterations"] = best_result->iterations();
    j["converged"] = best_result->converged;
    emit(out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
    return 0;
}

int cmd_sweep(const ChannelArgs& ch, const PowerArgs& pw, const DcArgs& dc, double delta,
              bool verify, const std::string& out)
{
    SweepOptions opts;
    opts.verify_removals = verify;
    const RateRegion region = sweep_region(load_channels(ch), pw.value(), delta, dc.config(), opts);
    emit(out, [&](std::ostream& o) { write_region_csv(o, region); });
    for (const auto& note : region.notes) std::cerr << "note: " << note << '\n';
    for (const auto& point : region.points)
        for (const auto& failure : point.failures) std::cerr << "warning: " << failure << '\n';
    return 0;
}

int cmd_baseline(const ChannelArgs& ch, const PowerArgs& pw, const DcArgs& dc, double delta,
                 const std::string& out)
{
    const RateRegion region = tdma_baseline(load_channels(ch), pw.value(), delta, dc.config());
    emit(out, [&](std::ostream& o) { write_region_csv(o, region); });
    return 0;
}

int cmd_oracle(const ChannelArgs& ch, const PowerArgs& pw, const DcArgs& dc, double delta,
               std::size_t grid, const std::string& dictionary, std::size_t unitaries,
               bool with_sweep, const std::string& out)
{
    const ChannelPair pair = load_channels(ch);
    const double p = pw.value();
    GridReferenceOptions opts;
    opts.dictionary = dictionary == "gsvd" ? Dictionary::GsvdOnly : Dictionary::Full;
    opts.random_unitaries = unitaries;
    opts.seed = ch.seed;
    opts.delta = delta;
    if (with_sweep) {
        if (pair.nt() > 2 || pair.nb() > 2 || pair.ne() > 2)
            throw DimensionTooLarge("oracle: grid reference needs Nt, Nb, Ne <= 2");
        const RateRegion swept = sweep_region(pair, p, delta, dc.config());
        opts.extra_pairs = region_covariances(gsvd(pair), swept);
    }
    const RateRegion region = grid_reference_region(pair, p, grid, opts);
    emit(out, [&](std::ostream& o) { write_region_csv(o, region); });
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> trials)
{
    ExperimentConfig cfg = load_config(config_path);
    if (!out.empty()) cfg.output_dir = out;
    if (seed) cfg.seed = *seed;
    if (trials) cfg.trials = *trials;
    cfg.validate();
    const ExperimentReport report = run_experiment(cfg);
    for (const auto& t : report.trials) {
        std::cerr << "trial " << t.index << ": " << to_string(t.status);
        if (!t.message.empty()) std::cerr << " (" << t.message << ")";
        std::cerr << '\n';
    }
    std::cout << report.manifest_path << '\n';
    return report.exit_code();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"GSVD precoding for a two-receiver MIMO broadcast channel with a multicast and a "
                 "confidential message"};
    app.require_subcommand(1);

    ChannelArgs ch;
    PowerArgs pw;
    DcArgs dc;
    std::string out;
    double delta = 0.1;
    double r_ms = 0.0;
    bool verify = false;
    std::size_t grid = 21;
    std::string dictionary = "full";
    std::size_t unitaries = 4;
    bool with_sweep = false;
    std::string config_path;
    std::optional<std::uint64_t> run_seed;
    std::optional<std::size_t> run_trials;

    auto* gen = app.add_subcommand("gen", "Generate an i.i.d. complex Gaussian channel pair");
    add_channel_options(gen, ch);
    gen->add_option("--out", out, "Output file (default stdout)");

    auto* gsvd_cmd = app.add_subcommand("gsvd", "Factor a channel pair and classify subchannels");
    add_channel_options(gsvd_cmd, ch);
    gsvd_cmd->add_option("--out", out, "Output JSON file (default stdout)");

    auto* solve = app.add_subcommand("solve", "Best allocation and powers at one multicast rate");
    add_channel_options(solve, ch);
    add_power_options(solve, pw);
    add_dc_options(solve, dc);
    solve->add_option("--r-ms", r_ms, "Required multicast rate (bits)")->check(CLI::NonNegativeNumber);
    solve->add_option("--out", out, "Output JSON file (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "Trace the GSVD rate region");
    add_channel_options(sweep, ch);
    add_power_options(sweep, pw);
    add_dc_options(sweep, dc);
    sweep->add_option("--delta", delta, "Multicast rate step (bits)")->check(CLI::PositiveNumber);
    sweep->add_flag("--verify-removals", verify, "Re-check removed schemes at later points");
    sweep->add_option("--out", out, "Output CSV file (default stdout)");

    auto* baseline = app.add_subcommand("baseline", "Time-sharing baseline region");
    add_channel_options(baseline, ch);
    add_power_options(baseline, pw);
    add_dc_options(baseline, dc);
    baseline->add_option("--delta", delta, "Multicast rate step (bits)")->check(CLI::PositiveNumber);
    baseline->add_option("--out", out, "Output CSV file (default stdout)");

    auto* oracle = app.add_subcommand("oracle", "Brute-force reference region (Nt, Nb, Ne <= 2)");
    add_channel_options(oracle, ch);
    add_power_options(oracle, pw);
    add_dc_options(oracle, dc);
    oracle->add_option("--delta", delta, "Multicast rate step (bits)")->check(CLI::PositiveNumber);
    oracle->add_option("--grid", grid, "Power levels per direction")->check(CLI::Range(2, 1000));
    oracle->add_option("--dictionary", dictionary, "Direction set")
        ->check(CLI::IsMember({"full", "gsvd"}));
    oracle->add_option("--unitaries", unitaries, "Random unitary directions (full dictionary)");
    oracle->add_flag("--with-sweep", with_sweep, "Also evaluate the GSVD sweep covariances");
    oracle->add_option("--out", out, "Output CSV file (default stdout)");

    auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
    run->add_option("config", config_path, "Config file")->required();
    run->add_option("--out", out, "Override output_dir");
    run->add_option("--seed", run_seed, "Override seed");
    run->add_option("--trials", run_trials, "Override trials")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*gen) return cmd_gen(ch, out);
        if (*gsvd_cmd) return cmd_gsvd(ch, out);
        if (*solve) return cmd_solve(ch, pw, dc, r_ms, out);
        if (*sweep) return cmd_sweep(ch, pw, dc, delta, verify, out);
        if (*baseline) return cmd_baseline(ch, pw, dc, delta, out);
        if (*oracle)
            return cmd_oracle(ch, pw, dc, delta, grid, dictionary, unitaries, with_sweep, out);
        if (*run) return cmd_run(config_path, out, run_seed, run_trials);
    } catch (const PhySiInfeasible& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const physi::Error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
