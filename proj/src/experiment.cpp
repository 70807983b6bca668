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

#include "physi/experiment.hpp"
#include "physi/channel_io.hpp"
#include "physi/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#ifndef PHYSI_VERSION
#define PHYSI_VERSION "0.0.0"
#endif

namespace physi {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Eigen::Index;

// ---- config parsing ------------------------------------------------------

[[noreturn]] void field_error(const std::string& field, const std::string& what)
{
    throw ConfigError("config field '" + field + "': " + what);
}

std::string join(const std::string& prefix, const std::string& key)
{
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> known)
{
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, value] : obj.items())
        if (allowed.count(key) == 0) field_error(join(prefix, key), "unknown key");
}

const json& require_object(const json& j, const std::string& field)
{
    if (!j.is_object()) field_error(field, "expected an object");
    return j;
}

double get_double(const json& j, const std::string& field)
{
    if (!j.is_number()) field_error(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) field_error(field, "must be finite");
    return v;
}

std::size_t get_count(const json& j, const std::string& field)
{
    if (!j.is_number_integer()) field_error(field, "expected a non-negative integer");
    if (j.is_number_unsigned()) return j.get<std::size_t>();
    const auto v = j.get<std::int64_t>();
    if (v < 0) field_error(field, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::uint64_t get_u64(const json& j, const std::string& field)
{
    if (!j.is_number_integer()) field_error(field, "expected a 64-bit unsigned integer");
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    const auto v = j.get<std::int64_t>();
    if (v < 0) field_error(field, "expected a 64-bit unsigned integer");
    return static_cast<std::uint64_t>(v);
}

bool get_bool(const json& j, const std::string& field)
{
    if (!j.is_boolean()) field_error(field, "expected true or false");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& field)
{
    if (!j.is_string()) field_error(field, "expected a string");
    return j.get<std::string>();
}

// [[ [re, im], ... ], ...] with one inner list per row.
CMatrix parse_inline_matrix(const json& j, const std::string& field)
{
    if (!j.is_array() || j.empty()) field_error(field, "expected a non-empty array of rows");
    const auto rows = static_cast<Index>(j.size());
    if (!j[0].is_array() || j[0].empty()) field_error(field + "[0]", "expected a non-empty row");
    const auto cols = static_cast<Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const std::string row_field = field + "[" + std::to_string(i) + "]";
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            field_error(row_field, "expected " + std::to_string(cols) + " entries");
        for (Index k = 0; k < cols; ++k) {
            const std::string entry_field = row_field + "[" + std::to_string(k) + "]";
            const json& e = row[static_cast<std::size_t>(k)];
            if (!e.is_array() || e.size() != 2) field_error(entry_field, "expected [re, im]");
            m(i, k) = {get_double(e[0], entry_field + "[0]"), get_double(e[1], entry_field + "[1]")};
        }
    }
    return m;
}

void parse_barrier(const json& j, BarrierOptions& b, const std::string& prefix)
{
    require_object(j, prefix);
    reject_unknown(j, prefix,
                   {"t_initial", "mu", "gap_tolerance", "newton_tolerance", "max_newton_steps"});
    if (j.contains("t_initial")) b.t_initial = get_double(j["t_initial"], join(prefix, "t_initial"));
    if (j.contains("mu")) b.mu = get_double(j["mu"], join(prefix, "mu"));
    if (j.contains("gap_tolerance"))
        b.gap_tolerance = get_double(j["gap_tolerance"], join(prefix, "gap_tolerance"));
    if (j.contains("newton_tolerance"))
        b.newton_tolerance = get_double(j["newton_tolerance"], join(prefix, "newton_tolerance"));
    if (j.contains("max_newton_steps"))
        b.max_newton_steps = get_count(j["max_newton_steps"], join(prefix, "max_newton_steps"));
}

void parse_dc(const json& j, DcConfig& dc)
{
    const std::string prefix = "dc";
    require_object(j, prefix);
    reject_unknown(j, prefix, {"epsilon", "max_iters", "init", "grid_points", "boost", "barrier"});
    if (j.contains("epsilon")) dc.epsilon = get_double(j["epsilon"], "dc.epsilon");
    if (j.contains("max_iters")) dc.max_dc_iters = get_count(j["max_iters"], "dc.max_iters");
    if (j.contains("grid_points")) dc.grid_points = get_count(j["grid_points"], "dc.grid_points");
    if (j.contains("boost")) dc.boost = get_bool(j["boost"], "dc.boost");
    if (j.contains("init")) {
        const std::string init = get_string(j["init"], "dc.init");
        if (init == "zero") dc.init = DcInit::Zero;
        else if (init == "uniform") dc.init = DcInit::Uniform;
        else field_error("dc.init", "expected \"zero\" or \"uniform\"");
    }
    if (j.contains("barrier")) parse_barrier(j["barrier"], dc.barrier, "dc.barrier");
}

void parse_power(const json& j, PowerSpec& p)
{
    require_object(j, "power");
    reject_unknown(j, "power", {"value", "unit"});
    if (!j.contains("value")) field_error("power.value", "missing");
    if (!j.contains("unit")) field_error("power.unit", "missing (\"dB\" or \"linear\")");
    p.value = get_double(j["value"], "power.value");
    const std::string unit = get_string(j["unit"], "power.unit");
    if (unit == "dB") p.unit = PowerUnit::Decibel;
    else if (unit == "linear") p.unit = PowerUnit::Linear;
    else field_error("power.unit", "expected \"dB\" or \"linear\", got \"" + unit + "\"");
}

void parse_channels(const json& j, ChannelSource& src)
{
    require_object(j, "channels");
    if (!j.contains("source")) field_error("channels.source", "missing");
    const std::string source = get_string(j["source"], "channels.source");
    if (source == "generated") {
        reject_unknown(j, "channels", {"source"});
        src.kind = ChannelSourceKind::Generated;
    } else if (source == "file") {
        reject_unknown(j, "channels", {"source", "path"});
        if (!j.contains("path")) field_error("channels.path", "missing");
        src.kind = ChannelSourceKind::File;
        src.path = get_string(j["path"], "channels.path");
    } else if (source == "inline") {
        reject_unknown(j, "channels", {"source", "h1", "h2"});
        if (!j.contains("h1")) field_error("channels.h1", "missing");
        if (!j.contains("h2")) field_error("channels.h2", "missing");
        src.kind = ChannelSourceKind::Inline;
        CMatrix h1 = parse_inline_matrix(j["h1"], "channels.h1");
        CMatrix h2 = parse_inline_matrix(j["h2"], "channels.h2");
        try {
            src.pair.emplace(std::move(h1), std::move(h2));
        } catch (const Error& e) {
            field_error("channels", e.what());
        }
    } else {
        field_error("channels.source", "expected \"generated\", \"file\" or \"inline\"");
    }
}

void parse_grid(const json& j, GridReferenceConfig& g)
{
    require_object(j, "grid_reference");
    reject_unknown(j, "grid_reference",
                   {"enabled", "grid", "dictionary", "random_unitaries", "include_sweep_covariances"});
    if (j.contains("enabled")) g.enabled = get_bool(j["enabled"], "grid_reference.enabled");
    if (j.contains("grid")) g.grid = get_count(j["grid"], "grid_reference.grid");
    if (j.contains("random_unitaries"))
        g.random_unitaries = get_count(j["random_unitaries"], "grid_reference.random_unitaries");
    if (j.contains("include_sweep_covariances"))
        g.include_sweep_covariances =
            get_bool(j["include_sweep_covariances"], "grid_reference.include_sweep_covariances");
    if (j.contains("dictionary")) {
        const std::string d = get_string(j["dictionary"], "grid_reference.dictionary");
        if (d == "full") g.dictionary = Dictionary::Full;
        else if (d == "gsvd") g.dictionary = Dictionary::GsvdOnly;
        else field_error("grid_reference.dictionary", "expected \"full\" or \"gsvd\"");
    }
}

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte)
{
    byte = std::min(byte, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

json matrix_to_json(const CMatrix& m)
{
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

json config_json(const ExperimentConfig& cfg)
{
    json j;
    j["nt"] = cfg.nt;
    j["nb"] = cfg.nb;
    j["ne"] = cfg.ne;
    j["power"] = {{"value", cfg.power.value},
                  {"unit", cfg.power.unit == PowerUnit::Decibel ? "dB" : "linear"}};
    j["delta"] = cfg.delta;
    j["seed"] = cfg.seed;
    j["trials"] = cfg.trials;
    j["output_dir"] = cfg.output_dir;
    j["workers"] = cfg.workers;
    j["dc"] = {{"epsilon", cfg.dc.epsilon},
               {"max_iters", cfg.dc.max_dc_iters},
               {"grid_points", cfg.dc.grid_points},
               {"boost", cfg.dc.boost},
               {"init", cfg.dc.init == DcInit::Zero ? "zero" : "uniform"},
               {"barrier",
                {{"t_initial", cfg.dc.barrier.t_initial},
                 {"mu", cfg.dc.barrier.mu},
                 {"gap_tolerance", cfg.dc.barrier.gap_tolerance},
                 {"newton_tolerance", cfg.dc.barrier.newton_tolerance},
                 {"max_newton_steps", cfg.dc.barrier.max_newton_steps}}}};
    switch (cfg.channels.kind) {
    case ChannelSourceKind::Generated:
        j["channels"] = {{"source", "generated"}};
        break;
    case ChannelSourceKind::File:
        j["channels"] = {{"source", "file"}, {"path", cfg.channels.path}};
        break;
    case ChannelSourceKind::Inline:
        j["channels"] = {{"source", "inline"},
                         {"h1", matrix_to_json(cfg.channels.pair->h1())},
                         {"h2", matrix_to_json(cfg.channels.pair->h2())}};
        break;
    }
    j["grid_reference"] = {
        {"enabled", cfg.grid_reference.enabled},
        {"grid", cfg.grid_reference.grid},
        {"dictionary", cfg.grid_reference.dictionary == Dictionary::Full ? "full" : "gsvd"},
        {"random_unitaries", cfg.grid_reference.random_unitaries},
        {"include_sweep_covariances", cfg.grid_reference.include_sweep_covariances}};
    return j;
}

// ---- trial execution -----------------------------------------------------

ChannelPair trial_channels(const ExperimentConfig& cfg, std::size_t index)
{
    switch (cfg.channels.kind) {
    case ChannelSourceKind::Generated:
        return generate_channels(cfg.nt, cfg.nb, cfg.ne, cfg.trial_seed(index));
    case ChannelSourceKind::File:
        return load_channel_pair(cfg.channels.path);
    case ChannelSourceKind::Inline:
        break;
    }
    return *cfg.channels.pair;
}

std::string suffixed(const std::string& stem, std::size_t index, const char* ext)
{
    return stem + "_t" + std::to_string(index) + ext;
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    writer(out);
    out.close();
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

ArtifactFile artifact(const fs::path& dir, const std::string& name)
{
    const fs::path full = dir / name;
    return {name, sha256_file(full.string()), fs::file_size(full)};
}

void run_trial(const ExperimentConfig& cfg, const fs::path& dir, TrialReport& report)
{
    const auto start = std::chrono::steady_clock::now();
    report.seed = cfg.channels.kind == ChannelSourceKind::Generated ? cfg.trial_seed(report.index) : 0;
    std::vector<std::string> written;
    try {
        const ChannelPair pair = trial_channels(cfg, report.index);
        const double p = cfg.power.linear();

        const std::string chan_name = suffixed("channels", report.index, ".txt");
        write_file(dir / chan_name, [&](std::ostream& o) { write_channel_pair(o, pair); });
        written.push_back(chan_name);

        const RateRegion gsvd_region = sweep_region(pair, p, cfg.delta, cfg.dc);
        const std::string gsvd_name = suffixed("gsvd_region", report.index, ".csv");
        write_file(dir / gsvd_name, [&](std::ostream& o) { write_region_csv(o, gsvd_region); });
        written.push_back(gsvd_name);

        const RateRegion tdma_region = tdma_baseline(pair, p, cfg.delta, cfg.dc);
        const std::string tdma_name = suffixed("tdma_region", report.index, ".csv");
        write_file(dir / tdma_name, [&](std::ostream& o) { write_region_csv(o, tdma_region); });
        written.push_back(tdma_name);

        std::vector<const RateRegion*> plotted{&gsvd_region, &tdma_region};
        std::optional<RateRegion> grid_region;
        const bool small = pair.nt() <= 2 && pair.nb() <= 2 && pair.ne() <= 2;
        if (cfg.grid_reference.enabled && small) {
            GridReferenceOptions opts;
            opts.dictionary = cfg.grid_reference.dictionary;
            opts.random_unitaries = cfg.grid_reference.random_unitaries;
            opts.seed = report.seed;
            opts.delta = cfg.delta;
            if (cfg.grid_reference.include_sweep_covariances)
                opts.extra_pairs = region_covariances(gsvd(pair), gsvd_region);
            grid_region = grid_reference_region(pair, p, cfg.grid_reference.grid, opts);
            const std::string grid_name = suffixed("grid_region", report.index, ".csv");
            write_file(dir / grid_name, [&](std::ostream& o) { write_region_csv(o, *grid_region); });
            written.push_back(grid_name);
            plotted.push_back(&*grid_region);
        }

        const std::string svg_name = suffixed("region", report.index, ".svg");
        const std::string title = "trial " + std::to_string(report.index) + ", P = " +
                                  format_double(p) + ", Nt=" + std::to_string(pair.nt()) +
                                  " Nb=" + std::to_string(pair.nb()) + " Ne=" + std::to_string(pair.ne());
        write_file(dir / svg_name, [&](std::ostream& o) { o << render_svg(plotted, title); });
        written.push_back(svg_name);

        report.status = TrialStatus::Ok;
    } catch (const PhySiInfeasible& e) {
        report.status = TrialStatus::Infeasible;
        report.message = e.what();
    } catch (const NumericalFailure& e) {
        report.status = TrialStatus::NumericalFailure;
        report.message = e.what();
    } catch (const std::exception& e) {
        report.status = TrialStatus::Error;
        report.message = e.what();
    }
    for (const auto& name : written) report.files.push_back(artifact(dir, name));
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string compiler_version()
{
#if defined(__clang__)
    return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
    return "gcc " + std::to_string(__GNUC__) + "." + std::to_string(__GNUC_MINOR__) + "." +
           std::to_string(__GNUC_PATCHLEVEL__);
#else
    return "unknown";
#endif
}

// ---- SVG -----------------------------------------------------------------

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Round up to 1, 2 or 5 times a power of ten.
double nice_ceiling(double v)
{
    if (!(v > 0.0)) return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= v) return m * mag;
    return 10.0 * mag;
}

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

// ---- public API ------------------------------------------------------------

double PowerSpec::linear() const
{
    return unit == PowerUnit::Decibel ? std::pow(10.0, value / 10.0) : value;
}

void ExperimentConfig::validate() const
{
    if (nt < 1) field_error("nt", "must be >= 1");
    if (nb < 1) field_error("nb", "must be >= 1");
    if (ne < 1) field_error("ne", "must be >= 1");
    if (!std::isfinite(power.value)) field_error("power.value", "must be finite");
    if (power.unit == PowerUnit::Linear && !(power.value > 0.0))
        field_error("power.value", "linear power must be > 0");
    if (!(power.linear() > 0.0) || !std::isfinite(power.linear()))
        field_error("power.value", "power must map to a finite positive linear value");
    if (!(delta > 0.0) || !std::isfinite(delta)) field_error("delta", "must be > 0");
    if (trials < 1) field_error("trials", "must be >= 1");
    if (output_dir.empty()) field_error("output_dir", "must not be empty");
    if (channels.kind != ChannelSourceKind::Generated && trials != 1)
        field_error("trials", "must be 1 when channels come from a file or inline matrices");
    if (channels.kind == ChannelSourceKind::File && channels.path.empty())
        field_error("channels.path", "must not be empty");
    if (channels.kind == ChannelSourceKind::Inline) {
        if (!channels.pair) field_error("channels", "inline matrices missing");
        if (channels.pair->nt() != nt || channels.pair->nb() != nb || channels.pair->ne() != ne)
            field_error("channels", "inline matrix shapes disagree with nt, nb, ne");
    }
    if (grid_reference.grid < 2) field_error("grid_reference.grid", "must be >= 2");
    if (!(dc.epsilon > 0.0)) field_error("dc.epsilon", "must be > 0");
    if (dc.max_dc_iters < 1) field_error("dc.max_iters", "must be >= 1");
    if (!(dc.barrier.t_initial > 0.0)) field_error("dc.barrier.t_initial", "must be > 0");
    if (!(dc.barrier.mu > 1.0)) field_error("dc.barrier.mu", "must be > 1");
    if (!(dc.barrier.gap_tolerance > 0.0)) field_error("dc.barrier.gap_tolerance", "must be > 0");
    try {
        dc.validate();
    } catch (const std::invalid_argument& e) {
        field_error("dc", e.what());
    }
}

std::uint64_t ExperimentConfig::trial_seed(std::size_t index) const
{
    return seed + static_cast<std::uint64_t>(index);
}

ExperimentConfig parse_config(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(json_text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream msg;
        msg << "config line " << line << ", column " << col << ": " << e.what();
        throw ConfigError(msg.str());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    reject_unknown(j, "",
                   {"nt", "nb", "ne", "power", "delta", "seed", "trials", "channels", "output_dir",
                    "dc", "grid_reference", "workers"});

    ExperimentConfig cfg;
    if (!j.contains("power")) field_error("power", "missing (e.g. {\"value\": 20, \"unit\": \"dB\"})");
    if (j.contains("nt")) cfg.nt = get_count(j["nt"], "nt");
    if (j.contains("nb")) cfg.nb = get_count(j["nb"], "nb");
    if (j.contains("ne")) cfg.ne = get_count(j["ne"], "ne");
    parse_power(j["power"], cfg.power);
    if (j.contains("delta")) cfg.delta = get_double(j["delta"], "delta");
    if (j.contains("seed")) cfg.seed = get_u64(j["seed"], "seed");
    if (j.contains("trials")) cfg.trials = get_count(j["trials"], "trials");
    if (j.contains("workers")) cfg.workers = get_count(j["workers"], "workers");
    if (j.contains("output_dir")) cfg.output_dir = get_string(j["output_dir"], "output_dir");
    if (j.contains("channels")) parse_channels(j["channels"], cfg.channels);
    if (j.contains("dc")) parse_dc(j["dc"], cfg.dc);
    if (j.contains("grid_reference")) parse_grid(j["grid_reference"], cfg.grid_reference);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& cfg)
{
    return config_json(cfg).dump(2);
}

const char* to_string(TrialStatus status)
{
    switch (status) {
    case TrialStatus::Ok: return "ok";
    case TrialStatus::Infeasible: return "infeasible";
    case TrialStatus::NumericalFailure: return "numerical_failure";
    case TrialStatus::Error: return "error";
    }
    return "unknown";
}

int ExperimentReport::exit_code() const
{
    for (const auto& t : trials) {
        switch (t.status) {
        case TrialStatus::Ok: continue;
        case TrialStatus::Infeasible: return 2;
        case TrialStatus::NumericalFailure: return 3;
        case TrialStatus::Error: return 1;
        }
    }
    return 0;
}

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "' for hashing");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256: digest init failed");
    }
    char buf[1 << 15];
    while (in) {
        in.read(buf, sizeof(buf));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

std::string render_svg(const std::vector<const RateRegion*>& regions, const std::string& title)
{
    constexpr double kWidth = 640.0;
    constexpr double kHeight = 480.0;
    constexpr double kLeft = 70.0;
    constexpr double kRight = 20.0;
    constexpr double kTop = 40.0;
    constexpr double kBottom = 60.0;
    constexpr int kTicks = 5;

    double xmax = 0.0;
    double ymax = 0.0;
    for (const auto* r : regions)
        for (const auto& p : r->points) {
            xmax = std::max(xmax, p.r_ms);
            ymax = std::max(ymax, p.r_c);
        }
    xmax = nice_ceiling(xmax);
    ymax = nice_ceiling(ymax);

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + pw * x / xmax; };
    auto sy = [&](double y) { return kTop + ph * (1.0 - y / ymax); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
        << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\">"
        << escape_xml(title) << "</text>\n";

    // Axes, grid and ticks.
    svg << "<g stroke=\"#ddd\">\n";
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = xmax * i / kTicks;
        const double fy = ymax * i / kTicks;
        svg << "<line x1=\"" << num(sx(fx)) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(sx(fx))
            << "\" y2=\"" << num(sy(ymax)) << "\"/>\n";
        svg << "<line x1=\"" << num(sx(0)) << "\" y1=\"" << num(sy(fy)) << "\" x2=\"" << num(sx(xmax))
            << "\" y2=\"" << num(sy(fy)) << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop)
        << "\" width=\"" << num(pw) << "\" height=\"" << num(ph) << "\"/></g>\n";
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = xmax * i / kTicks;
        const double fy = ymax * i / kTicks;
        svg << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(sy(0) + 18)
            << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
        svg << "<text x=\"" << num(sx(0) - 8) << "\" y=\"" << num(sy(fy) + 4)
            << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    }
    svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
        << "\" text-anchor=\"middle\">multicast rate R0 (bits/s/Hz)</text>\n";
    svg << "<text transform=\"translate(18," << num(kTop + ph / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">secrecy rate Rc (bits/s/Hz)</text>\n";

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    static const char* kDashes[] = {"none", "6,4", "2,3", "8,3,2,3"};
    for (std::size_t k = 0; k < regions.size(); ++k) {
        const RateRegion& r = *regions[k];
        const char* color = kColors[k % 4];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" stroke-dasharray=\""
            << kDashes[k % 4] << "\" points=\"";
        for (std::size_t i = 0; i < r.points.size(); ++i) {
            if (i > 0) svg << ' ';
            svg << num(sx(r.points[i].r_ms)) << ',' << num(sy(r.points[i].r_c));
        }
        svg << "\"/>\n";
        const double ly = kTop + 16.0 + 16.0 * static_cast<double>(k);
        const double lx = kLeft + pw - 150.0;
        svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 24)
            << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\" stroke-dasharray=\""
            << kDashes[k % 4] << "\"/>\n";
        svg << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(ly) << "\">" << to_string(r.label)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

ExperimentReport run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ConfigError("output_dir '" + cfg.output_dir + "' cannot be created: " + ec.message());

    ExperimentReport report;
    report.trials.resize(cfg.trials);
    for (std::size_t i = 0; i < cfg.trials; ++i) report.trials[i].index = i;

    std::size_t workers = cfg.workers != 0 ? cfg.workers : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, cfg.trials);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cfg.trials; i = next++) run_trial(cfg, dir, report.trials[i]);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json manifest;
    manifest["config"] = config_json(cfg);
    manifest["power_linear"] = cfg.power.linear();
    manifest["versions"] = {{"physi", PHYSI_VERSION},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                          std::to_string(EIGEN_MINOR_VERSION)},
                            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                            {"compiler", compiler_version()}};
    manifest["prng"] = "splitmix64-counter, box-muller, (x + iy)/sqrt(2)";
    manifest["wall_seconds"] = report.wall_seconds;
    manifest["exit_code"] = report.exit_code();
    json trials = json::array();
    json files = json::array();
    for (const auto& t : report.trials) {
        json tj;
        tj["index"] = t.index;
        tj["seed"] = t.seed;
        tj["status"] = to_string(t.status);
        if (!t.message.empty()) tj["message"] = t.message;
        tj["wall_seconds"] = t.wall_seconds;
        json tf = json::array();
        for (const auto& f : t.files) {
            json fj = {{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}};
            tf.push_back(fj);
            files.push_back(fj);
        }
        tj["files"] = std::move(tf);
        trials.push_back(std::move(tj));
    }
    manifest["trials"] = std::move(trials);
    manifest["files"] = std::move(files);

    const fs::path manifest_path = dir / "manifest.json";
    write_file(manifest_path, [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
    report.manifest_path = manifest_path.string();
    return report;
}

} // namespace physi
