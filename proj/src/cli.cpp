/*
 * Copyright 2026 The chcntk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "chcntk/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chcntk/dataset.hpp"
#include "chcntk/error.hpp"
#include "chcntk/parallel.hpp"

namespace chcntk::cli {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void field_error(const std::string &source, const std::string &field, const std::string &what) {
    throw Error(ErrorCode::ConfigParse, source + ": field '" + field + "': " + what);
}

void check_keys(const json &obj, std::initializer_list<std::string_view> allowed, const std::string &source,
                const std::string &prefix) {
    for (const auto &item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            field_error(source, prefix + item.key(), "unknown field");
        }
    }
}

double as_number(const json &v, const std::string &source, const std::string &field) {
    if (!v.is_number()) { field_error(source, field, "expected a number"); }
    return v.get<double>();
}

int as_int(const json &v, const std::string &source, const std::string &field) {
    if (!v.is_number_integer()) { field_error(source, field, "expected an integer"); }
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        field_error(source, field, "integer out of range");
    }
    return static_cast<int>(x);
}

bool as_bool(const json &v, const std::string &source, const std::string &field) {
    if (!v.is_boolean()) { field_error(source, field, "expected true or false"); }
    return v.get<bool>();
}

std::string as_string(const json &v, const std::string &source, const std::string &field) {
    if (!v.is_string()) { field_error(source, field, "expected a string"); }
    return v.get<std::string>();
}

// A number or the string "inf".
double as_snr(const json &v, const std::string &source, const std::string &field) {
    if (v.is_string() && v.get<std::string>() == "inf") { return kInf; }
    if (!v.is_number()) { field_error(source, field, "expected a number or \"inf\""); }
    return v.get<double>();
}

// Accepts a scalar or an array of scalars.
template<typename F>
auto as_list(const json &v, const std::string &source, const std::string &field, F &&item) {
    std::vector<decltype(item(v, source, field))> out;
    if (v.is_array()) {
        if (v.empty()) { field_error(source, field, "list must not be empty"); }
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(item(v[i], source, field + "[" + std::to_string(i) + "]"));
        }
    } else {
        out.push_back(item(v, source, field));
    }
    return out;
}

PatternSpec parse_pattern(const json &v, const std::string &source, const std::string &field) {
    if (!v.is_object()) { field_error(source, field, "expected an object"); }
    check_keys(v, {"sc_spacing", "sym_spacing", "sc_offset", "sym_offset"}, source, field + ".");
    PatternSpec p;
    if (v.contains("sc_spacing")) { p.sc_spacing = as_int(v["sc_spacing"], source, field + ".sc_spacing"); }
    if (v.contains("sym_spacing")) { p.sym_spacing = as_int(v["sym_spacing"], source, field + ".sym_spacing"); }
    if (v.contains("sc_offset")) { p.sc_offset = as_int(v["sc_offset"], source, field + ".sc_offset"); }
    if (v.contains("sym_offset")) { p.sym_offset = as_int(v["sym_offset"], source, field + ".sym_offset"); }
    return p;
}

PatternSpec preset_pattern(int per_rb, const std::string &source, const std::string &field) {
    try {
        return PatternSpec::from_preset(pilot_preset(per_rb));
    } catch (const Error &e) { field_error(source, field, e.what()); }
}

void apply_cntk(const json &v, ImputeOptions &opt, const std::string &source) {
    if (!v.is_object()) { field_error(source, "cntk", "expected an object"); }
    check_keys(v,
               {"depth", "filter_size", "neg_slope", "pos_slope", "corr_eps", "ridge", "ridge_mode", "prior",
                "position_level", "block_rows", "pool_ridge"},
               source, "cntk.");
    if (v.contains("depth")) { opt.cntk.depth = as_int(v["depth"], source, "cntk.depth"); }
    if (v.contains("filter_size")) { opt.cntk.filter_size = as_int(v["filter_size"], source, "cntk.filter_size"); }
    if (v.contains("neg_slope")) { opt.cntk.neg_slope = as_number(v["neg_slope"], source, "cntk.neg_slope"); }
    if (v.contains("pos_slope")) { opt.cntk.pos_slope = as_number(v["pos_slope"], source, "cntk.pos_slope"); }
    if (v.contains("corr_eps")) { opt.cntk.corr_eps = as_number(v["corr_eps"], source, "cntk.corr_eps"); }
    if (v.contains("ridge")) {
        const auto &r = v["ridge"];
        if (r.is_string() && r.get<std::string>() == "auto") {
            opt.ridge = RidgeSpec::automatic();
        } else {
            opt.ridge = RidgeSpec::relative(as_number(r, source, "cntk.ridge"));
        }
    }
    if (v.contains("ridge_mode")) {
        const auto mode = as_string(v["ridge_mode"], source, "cntk.ridge_mode");
        if (mode == "relative") {
            opt.ridge.mode = RidgeSpec::Mode::Relative;
        } else if (mode == "absolute") {
            opt.ridge.mode = RidgeSpec::Mode::Absolute;
        } else if (mode == "auto") {
            opt.ridge.mode = RidgeSpec::Mode::Auto;
        } else {
            field_error(source, "cntk.ridge_mode", "expected auto, relative or absolute");
        }
    }
    if (v.contains("prior")) {
        const auto prior = as_string(v["prior"], source, "cntk.prior");
        if (prior == "position") {
            opt.prior = PriorKind::Position;
        } else if (prior == "pilot") {
            opt.prior = PriorKind::Pilot;
        } else {
            field_error(source, "cntk.prior", "expected position or pilot");
        }
    }
    if (v.contains("position_level")) {
        opt.position_level = as_number(v["position_level"], source, "cntk.position_level");
    }
    if (v.contains("block_rows")) { opt.block_rows = as_int(v["block_rows"], source, "cntk.block_rows"); }
    if (v.contains("pool_ridge")) { opt.pool_ridge = as_bool(v["pool_ridge"], source, "cntk.pool_ridge"); }
}

std::string line_col(const std::string &text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string snr_text(double snr) { return std::isinf(snr) ? "inf" : format_number(snr); }

json snr_json(double snr) { return std::isinf(snr) ? json("inf") : json(snr); }

std::vector<double> parse_number_list(const std::string &text, const std::string &flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "inf") {
            out.push_back(kInf);
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) { used = 0; }
        if (used == 0 || used != item.size()) {
            throw Error(ErrorCode::InvalidArgument, flag + ": '" + item + "' is not a number");
        }
        out.push_back(v);
    }
    if (out.empty()) { throw Error(ErrorCode::InvalidArgument, flag + ": empty list"); }
    return out;
}

std::vector<std::string> split_words(const std::string &text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) { out.push_back(item); }
    }
    return out;
}

void ensure_parent(const std::string &path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
}

json pattern_json(const PatternSpec &p) {
    return {{"sc_spacing", p.sc_spacing}, {"sym_spacing", p.sym_spacing}, {"sc_offset", p.sc_offset},
            {"sym_offset", p.sym_offset}};
}

json cntk_json(const ImputeOptions &opt) {
    const char *mode = opt.ridge.mode == RidgeSpec::Mode::Auto       ? "auto"
                       : opt.ridge.mode == RidgeSpec::Mode::Relative ? "relative"
                                                                     : "absolute";
    return {{"depth", opt.cntk.depth},
            {"filter_size", opt.cntk.filter_size},
            {"neg_slope", opt.cntk.neg_slope},
            {"pos_slope", opt.cntk.pos_slope},
            {"ridge_mode", mode},
            {"ridge", opt.ridge.value},
            {"prior", opt.prior == PriorKind::Position ? "position" : "pilot"},
            {"position_level", opt.position_level},
            {"block_rows", opt.block_rows},
            {"pool_ridge", opt.pool_ridge}};
}

// Flags shared by the commands that run the CNTK estimator.
struct CntkFlags {
    std::optional<double> lambda;
    std::optional<std::string> ridge_mode;
    std::optional<int> depth;
    std::optional<std::string> prior;
    std::optional<int> knn_k;

    void add_to(CLI::App &cmd) {
        cmd.add_option("--lambda", lambda, "Ridge added to K_oo (absolute unless --ridge-mode relative)");
        cmd.add_option("--ridge-mode", ridge_mode, "auto | relative | absolute")
            ->check(CLI::IsMember({"auto", "relative", "absolute"}));
        cmd.add_option("--depth", depth, "CNTK depth");
        cmd.add_option("--prior", prior, "position | pilot")->check(CLI::IsMember({"position", "pilot"}));
        cmd.add_option("--knn-k", knn_k, "Neighbours for the knn method");
    }

    void apply(MethodOptions &opt) const {
        if (lambda) { opt.cntk.ridge = RidgeSpec::absolute(*lambda); }
        if (ridge_mode) {
            if (*ridge_mode == "auto") {
                opt.cntk.ridge.mode = RidgeSpec::Mode::Auto;
            } else if (*ridge_mode == "relative") {
                opt.cntk.ridge.mode = RidgeSpec::Mode::Relative;
            } else {
                opt.cntk.ridge.mode = RidgeSpec::Mode::Absolute;
            }
        }
        if (depth) { opt.cntk.cntk.depth = *depth; }
        if (prior) { opt.cntk.prior = *prior == "pilot" ? PriorKind::Pilot : PriorKind::Position; }
        if (knn_k) { opt.knn_k = *knn_k; }
    }
};

unsigned thread_cap(std::optional<unsigned> flag) {
    const unsigned env = default_thread_count();
    if (!flag || *flag == 0) { return env; }
    return std::getenv("CHCNTK_THREADS") != nullptr ? std::min(*flag, env) : *flag;
}

SparseChannelEstimate record_observation(const DatasetRecord &rec, bool full_mask) {
    PilotPattern pattern;
    pattern.mask = full_mask ? Mask::Constant(rec.mask.rows(), rec.mask.cols(), true) : rec.mask;
    return ls_estimate(rec.received, rec.transmitted, pattern);
}

// --- simulate ---------------------------------------------------------------

int cmd_simulate(const std::string &config_path, const std::optional<std::string> &out_flag,
                 std::optional<unsigned> threads, std::ostream &out) {
    RunConfig cfg = load_config(config_path, ConfigKind::Simulate);
    if (out_flag) { cfg.output = *out_flag; }
    cfg.sweep.threads = thread_cap(threads);
    cfg.sweep.validate();
    if (cfg.sweep.patterns.size() != 1) {
        throw Error(ErrorCode::ConfigParse, config_path + ": simulate takes exactly one pilot pattern");
    }
    PatternSpec pattern = cfg.full_mask ? PatternSpec{1, 1, 0, 0} : cfg.sweep.patterns.front();
    const std::string path = resolve_output(cfg.output);

    const auto n_real = static_cast<std::size_t>(cfg.sweep.realizations);
    const std::size_t n_snr = cfg.sweep.snr_db.size();
    std::vector<std::optional<DatasetRecord>> slots(n_real * n_snr);
    parallel_for(slots.size(), cfg.sweep.threads, [&](std::size_t i) {
        const std::size_t r = i / n_snr;
        const std::size_t s = i % n_snr;
        auto obs = simulate_observation(cfg.sweep, static_cast<int>(r), s, pattern);
        slots[i] = DatasetRecord{std::move(obs.channel.h), std::move(obs.transmitted), std::move(obs.received),
                                 std::move(obs.pattern.mask), cfg.sweep.snr_db[s]};
    });
    Dataset ds;
    ds.records.reserve(slots.size());
    for (auto &rec : slots) { ds.records.push_back(std::move(*rec)); }

    json snrs = json::array();
    for (double s : cfg.sweep.snr_db) { snrs.push_back(snr_json(s)); }
    json taps = json::array();
    for (const auto &t : cfg.sweep.taps) { taps.push_back({{"delay_ns", t.delay_s * 1e9}, {"power_db", t.power_db}}); }
    ds.manifest = {{"format", "chcntk-dataset"},
                   {"version", 1},
                   {"seed", cfg.sweep.seed},
                   {"realizations", cfg.sweep.realizations},
                   {"snr_db", snrs},
                   {"record_order", "realization-major"},
                   {"pattern", pattern_json(pattern)},
                   {"full_mask", cfg.full_mask},
                   {"grid",
                    {{"rows", cfg.sweep.rows},
                     {"cols", cfg.sweep.cols},
                     {"subcarrier_spacing_hz", cfg.sweep.subcarrier_spacing_hz},
                     {"symbol_duration_s", cfg.sweep.symbol_duration_s}}},
                   {"channel", {{"doppler_hz", cfg.sweep.doppler_hz}, {"taps", taps}}}};
    ensure_parent(path);
    write_dataset(path, ds);

    const auto pat = pattern.make(cfg.sweep.rows, cfg.sweep.cols);
    out << "wrote " << ds.records.size() << " records to " << path << "\n";
    out << "grid " << cfg.sweep.rows << "x" << cfg.sweep.cols << ", snr_db";
    for (double s : cfg.sweep.snr_db) { out << ' ' << snr_text(s); }
    out << ", pattern sc " << pattern.sc_spacing << " sym " << pattern.sym_spacing << " ("
        << format_number(pat.pilots_per_rb()) << " pilots/RB), seed " << cfg.sweep.seed << "\n";
    return 0;
}

// --- estimate ---------------------------------------------------------------

int cmd_estimate(const std::string &dataset_path, const std::string &method_tag_text, const std::string &out_path,
                 bool full_mask, const CntkFlags &flags, std::optional<unsigned> threads, std::ostream &out) {
    const Method method = parse_method(method_tag_text);
    MethodOptions opt;
    flags.apply(opt);
    opt.cntk.threads = thread_cap(threads);
    opt.cntk.cntk.validate();

    const Dataset ds = read_dataset(dataset_path);
    std::vector<ComplexMatrix> estimates;
    estimates.reserve(ds.records.size());
    double ratio_sum = 0.0;
    double max_residual = 0.0;
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const auto &rec = ds.records[i];
        const SparseChannelEstimate sparse = record_observation(rec, full_mask);
        ComplexMatrix h_hat;
        try {
            h_hat = run_method(method, sparse, opt);
        } catch (const Error &e) {
            throw Error(e.code(), "record " + std::to_string(i) + ": " + e.what());
        }
        const double ratio = nmse_ratio(rec.h_true, h_hat);
        ratio_sum += ratio;
        const double peak = sparse.values().cwiseAbs().maxCoeff();
        for (int m = 0; m < sparse.rows(); ++m) {
            for (int n = 0; n < sparse.cols(); ++n) {
                if (!sparse.mask()(m, n)) { continue; }
                const double r = std::abs(h_hat(m, n) - sparse.values()(m, n)) / (peak > 0.0 ? peak : 1.0);
                max_residual = std::max(max_residual, r);
            }
        }
        out << "record " << i << " snr_db " << snr_text(rec.snr_db) << " nmse_db " << format_number(ratio_to_db(ratio))
            << "\n";
        estimates.push_back(std::move(h_hat));
    }
    const std::string path = resolve_output(out_path);
    json header = {{"method", std::string(method_tag(method))}, {"full_mask", full_mask}};
    if (method == Method::Cntk) { header["cntk"] = cntk_json(opt.cntk); }
    if (method == Method::Knn) { header["knn_k"] = opt.knn_k; }
    ensure_parent(path);
    write_estimates(path, estimates, header);

    const double mean_ratio = ds.records.empty() ? 0.0 : ratio_sum / static_cast<double>(ds.records.size());
    out << "aggregate nmse_db " << format_number(ratio_to_db(mean_ratio)) << " over " << ds.records.size()
        << " records\n";
    out << "max pilot residual " << format_number(max_residual) << "\n";
    out << "wrote " << path << "\n";
    return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepFlags {
    std::optional<std::string> snr;
    std::optional<std::string> pilots;
    std::optional<std::string> methods;
    std::optional<int> realizations;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> plot;
    bool timing = false;
};

int cmd_sweep(const std::optional<std::string> &config_path, const std::optional<std::string> &out_flag,
              const SweepFlags &flags, const CntkFlags &cntk_flags, std::optional<unsigned> threads,
              std::ostream &out) {
    RunConfig cfg = config_path ? load_config(*config_path, ConfigKind::Sweep) : default_config(ConfigKind::Sweep);
    if (out_flag) { cfg.output = *out_flag; }
    if (flags.snr) { cfg.sweep.snr_db = parse_number_list(*flags.snr, "--snr"); }
    if (flags.pilots) {
        cfg.sweep.patterns.clear();
        for (double p : parse_number_list(*flags.pilots, "--pilots-per-rb")) {
            cfg.sweep.patterns.push_back(PatternSpec::from_preset(pilot_preset(static_cast<int>(p))));
        }
    }
    if (flags.methods) {
        cfg.sweep.methods.clear();
        for (const auto &m : split_words(*flags.methods)) { cfg.sweep.methods.push_back(parse_method(m)); }
    }
    if (flags.realizations) { cfg.sweep.realizations = *flags.realizations; }
    if (flags.seed) {
        cfg.sweep.seed = *flags.seed;
        cfg.has_seed = true;
    }
    if (!cfg.has_seed) {
        throw Error(ErrorCode::ConfigParse, "missing required field 'seed' (config or --seed)");
    }
    cntk_flags.apply(cfg.sweep.method_options);
    cfg.sweep.timing = flags.timing;
    cfg.sweep.threads = thread_cap(threads);

    const SweepResult result = run_sweep(cfg.sweep);
    const std::string path = resolve_output(cfg.output);
    ensure_parent(path);
    {
        std::ofstream f(path, std::ios::binary);
        f << to_csv(result);
        if (!f) { throw Error(ErrorCode::Io, "cannot write '" + path + "'"); }
    }
    if (flags.plot) {
        const std::string plot_path = resolve_output(*flags.plot);
        ensure_parent(plot_path);
        std::ofstream f(plot_path, std::ios::binary);
        f << to_plot_series(result);
        if (!f) { throw Error(ErrorCode::Io, "cannot write '" + plot_path + "'"); }
    }
    out << "wrote " << result.rows.size() << " rows to " << path << "\n";
    return 0;
}

// --- kernel-dump ------------------------------------------------------------

RealMatrix read_matrix_csv(const std::string &path) {
    std::ifstream f(path);
    if (!f) { throw Error(ErrorCode::Io, "cannot open '" + path + "'"); }
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) { continue; }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) { row.push_back(std::stod(cell)); }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw Error(ErrorCode::Format, "ragged kernel CSV '" + path + "'");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) { throw Error(ErrorCode::Format, "empty kernel CSV '" + path + "'"); }
    RealMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    return m;
}

int cmd_kernel_dump(const std::string &dataset_path, int block, int record, const std::string &out_path,
                    bool verify, const CntkFlags &flags, std::ostream &out, std::ostream &err) {
    MethodOptions opt;
    flags.apply(opt);
    opt.cntk.cntk.validate();
    const Dataset ds = read_dataset(dataset_path);
    if (record < 0 || static_cast<std::size_t>(record) >= ds.records.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "record " + std::to_string(record) + " outside [0, " +
                                                    std::to_string(ds.records.size()) + ")");
    }
    const auto blocks = split_blocks(record_observation(ds.records[static_cast<std::size_t>(record)], false),
                                     opt.cntk.block_rows);
    if (block < 0 || static_cast<std::size_t>(block) >= blocks.size()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "block " + std::to_string(block) + " outside [0, " + std::to_string(blocks.size()) + ")");
    }
    const BlockKernel bk = block_kernel(blocks[static_cast<std::size_t>(block)], opt.cntk);
    const RealMatrix &g = bk.kernel->gram;

    const std::string path = resolve_output(out_path);
    ensure_parent(path);
    {
        std::ofstream f(path, std::ios::binary);
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            for (Eigen::Index c = 0; c < g.cols(); ++c) {
                char cell[32];
                std::snprintf(cell, sizeof(cell), "%.17g", g(r, c));
                f << (c > 0 ? "," : "") << cell;
            }
            f << '\n';
        }
        if (!f) { throw Error(ErrorCode::Io, "cannot write '" + path + "'"); }
    }
    out << "wrote " << g.rows() << "x" << g.cols() << " kernel to " << path << "\n";
    if (verify) {
        const RealMatrix back = read_matrix_csv(path);
        if (back.rows() != back.cols()) {
            err << "error: kernel is not square (" << back.rows() << "x" << back.cols() << ")\n";
            return 1;
        }
        const double scale = std::max(back.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
        const double asym = (back - back.transpose()).cwiseAbs().maxCoeff() / scale;
        out << "max relative asymmetry " << format_number(asym) << "\n";
        if (asym > 1e-10) {
            err << "error: kernel is not symmetric\n";
            return 1;
        }
    }
    return 0;
}

}  // namespace

RunConfig default_config(ConfigKind kind) {
    RunConfig cfg;
    if (kind == ConfigKind::Simulate) {
        cfg.sweep.realizations = 1;
        cfg.sweep.snr_db = {20.0};
        cfg.output = "dataset.chgrid";
    } else {
        cfg.sweep.patterns = {PatternSpec::from_preset(pilot_preset(24)), PatternSpec::from_preset(pilot_preset(12))};
        cfg.output = "sweep.csv";
    }
    return cfg;
}

RunConfig parse_config(const std::string &text, const std::string &source, RunConfig cfg) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw Error(ErrorCode::ConfigParse, source + ": " + line_col(text, e.byte) + ": invalid JSON");
    }
    if (!doc.is_object()) { throw Error(ErrorCode::ConfigParse, source + ": top level must be an object"); }
    check_keys(doc,
               {"seed", "realizations", "snr_db", "pilots_per_rb", "pattern", "grid", "channel", "methods", "cntk",
                "knn_k", "full_mask", "output"},
               source, "");
    auto &sw = cfg.sweep;
    if (doc.contains("seed")) {
        const auto &s = doc["seed"];
        if (!s.is_number_unsigned()) { field_error(source, "seed", "expected a non-negative integer"); }
        sw.seed = s.get<std::uint64_t>();
        cfg.has_seed = true;
    }
    if (doc.contains("realizations")) { sw.realizations = as_int(doc["realizations"], source, "realizations"); }
    if (doc.contains("snr_db")) { sw.snr_db = as_list(doc["snr_db"], source, "snr_db", as_snr); }
    if (doc.contains("pilots_per_rb") && doc.contains("pattern")) {
        field_error(source, "pattern", "give either pilots_per_rb or pattern, not both");
    }
    if (doc.contains("pilots_per_rb")) {
        sw.patterns = as_list(doc["pilots_per_rb"], source, "pilots_per_rb",
                              [](const json &v, const std::string &src, const std::string &f) {
                                  return preset_pattern(as_int(v, src, f), src, f);
                              });
    }
    if (doc.contains("pattern")) { sw.patterns = as_list(doc["pattern"], source, "pattern", parse_pattern); }
    if (doc.contains("grid")) {
        const auto &g = doc["grid"];
        if (!g.is_object()) { field_error(source, "grid", "expected an object"); }
        check_keys(g, {"rows", "cols", "subcarrier_spacing_hz", "symbol_duration_s"}, source, "grid.");
        if (g.contains("rows")) { sw.rows = as_int(g["rows"], source, "grid.rows"); }
        if (g.contains("cols")) { sw.cols = as_int(g["cols"], source, "grid.cols"); }
        if (g.contains("subcarrier_spacing_hz")) {
            sw.subcarrier_spacing_hz = as_number(g["subcarrier_spacing_hz"], source, "grid.subcarrier_spacing_hz");
        }
        if (g.contains("symbol_duration_s")) {
            sw.symbol_duration_s = as_number(g["symbol_duration_s"], source, "grid.symbol_duration_s");
        }
    }
    if (doc.contains("channel")) {
        const auto &c = doc["channel"];
        if (!c.is_object()) { field_error(source, "channel", "expected an object"); }
        check_keys(c, {"doppler_hz", "taps"}, source, "channel.");
        if (c.contains("doppler_hz")) { sw.doppler_hz = as_number(c["doppler_hz"], source, "channel.doppler_hz"); }
        if (c.contains("taps")) {
            const auto &t = c["taps"];
            if (!t.is_array() || t.empty()) { field_error(source, "channel.taps", "expected a non-empty list"); }
            sw.taps.clear();
            for (std::size_t i = 0; i < t.size(); ++i) {
                const std::string f = "channel.taps[" + std::to_string(i) + "]";
                if (!t[i].is_object()) { field_error(source, f, "expected an object"); }
                check_keys(t[i], {"delay_ns", "power_db"}, source, f + ".");
                if (!t[i].contains("delay_ns") || !t[i].contains("power_db")) {
                    field_error(source, f, "needs delay_ns and power_db");
                }
                sw.taps.push_back({as_number(t[i]["delay_ns"], source, f + ".delay_ns") * 1e-9,
                                   as_number(t[i]["power_db"], source, f + ".power_db")});
            }
        }
    }
    if (doc.contains("methods")) {
        sw.methods = as_list(doc["methods"], source, "methods", [](const json &v, const std::string &src,
                                                                   const std::string &f) {
            try {
                return parse_method(as_string(v, src, f));
            } catch (const Error &e) {
                if (e.code() == ErrorCode::ConfigParse) { throw; }
                field_error(src, f, e.what());
            }
        });
    }
    if (doc.contains("cntk")) { apply_cntk(doc["cntk"], sw.method_options.cntk, source); }
    if (doc.contains("knn_k")) { sw.method_options.knn_k = as_int(doc["knn_k"], source, "knn_k"); }
    if (doc.contains("full_mask")) { cfg.full_mask = as_bool(doc["full_mask"], source, "full_mask"); }
    if (doc.contains("output")) { cfg.output = as_string(doc["output"], source, "output"); }
    return cfg;
}

RunConfig load_config(const std::string &path, ConfigKind kind) {
    std::ifstream f(path, std::ios::binary);
    if (!f) { throw Error(ErrorCode::Io, "cannot open config '" + path + "'"); }
    std::stringstream ss;
    ss << f.rdbuf();
    RunConfig cfg = parse_config(ss.str(), path, default_config(kind));
    if (!cfg.has_seed) { throw Error(ErrorCode::ConfigParse, path + ": missing required field 'seed'"); }
    return cfg;
}

std::string resolve_output(const std::string &path) {
    const char *dir = std::getenv("CHCNTK_OUTPUT_DIR");
    if (dir == nullptr || *dir == '\0' || std::filesystem::path(path).is_absolute()) { return path; }
    return (std::filesystem::path(dir) / path).string();
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Channel estimation by convolutional neural tangent kernel imputation"};
    app.name("chcntk");
    app.require_subcommand(1);
    app.set_version_flag("--version", "chcntk 0.1.0");

    std::optional<unsigned> threads;
    std::optional<std::string> out_path;

    auto *simulate = app.add_subcommand("simulate", "Simulate a dataset of OFDM grids from a config");
    std::string sim_config;
    simulate->add_option("config", sim_config, "JSON config")->required();
    simulate->add_option("-o,--out", out_path, "Dataset path (overrides the config)");
    simulate->add_option("--threads", threads, "Worker thread cap");

    auto *estimate = app.add_subcommand("estimate", "Run one estimator over every record of a dataset");
    std::string est_dataset;
    std::string est_method;
    std::string est_out;
    bool est_full_mask = false;
    CntkFlags est_cntk;
    estimate->add_option("dataset", est_dataset, "Dataset path")->required();
    estimate->add_option("-m,--method", est_method, "cntk | nearest | knn | linear")->required();
    estimate->add_option("-o,--out", est_out, "Estimate file")->required();
    estimate->add_flag("--full-mask", est_full_mask, "Treat every cell as a pilot");
    est_cntk.add_to(*estimate);
    estimate->add_option("--threads", threads, "Worker thread cap");

    auto *sweep = app.add_subcommand("sweep", "NMSE sweep over SNRs, pilot densities and methods");
    std::optional<std::string> sweep_config;
    SweepFlags sweep_flags;
    CntkFlags sweep_cntk;
    sweep->add_option("config", sweep_config, "JSON config");
    sweep->add_option("-o,--out", out_path, "CSV path (overrides the config)");
    sweep->add_option("--snr", sweep_flags.snr, "Comma-separated SNRs in dB");
    sweep->add_option("--pilots-per-rb", sweep_flags.pilots, "Comma-separated presets (24, 16, 12)");
    sweep->add_option("--methods", sweep_flags.methods, "Comma-separated method tags");
    sweep->add_option("--realizations", sweep_flags.realizations, "Channel realizations per cell");
    sweep->add_option("--seed", sweep_flags.seed, "Base seed");
    sweep->add_option("--plot", sweep_flags.plot, "Also write x/y series for plotting");
    sweep->add_flag("--timing", sweep_flags.timing, "Record solve times (CSV no longer reproducible)");
    sweep_cntk.add_to(*sweep);
    sweep->add_option("--threads", threads, "Worker thread cap");

    auto *dump = app.add_subcommand("kernel-dump", "Write the CNTK gram matrix of one block as CSV");
    std::string dump_dataset;
    std::string dump_out;
    int dump_block = 0;
    int dump_record = 0;
    bool dump_verify = false;
    CntkFlags dump_cntk;
    dump->add_option("dataset", dump_dataset, "Dataset path")->required();
    dump->add_option("-b,--block", dump_block, "Block index")->required();
    dump->add_option("-r,--record", dump_record, "Record index");
    dump->add_option("-o,--out", dump_out, "CSV path")->required();
    dump->add_flag("--verify", dump_verify, "Re-read the CSV and check that it is symmetric");
    dump_cntk.add_to(*dump);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) { return app.exit(e, out, err); }

    try {
        if (*simulate) { return cmd_simulate(sim_config, out_path, threads, out); }
        if (*estimate) {
            return cmd_estimate(est_dataset, est_method, est_out, est_full_mask, est_cntk, threads, out);
        }
        if (*sweep) { return cmd_sweep(sweep_config, out_path, sweep_flags, sweep_cntk, threads, out); }
        if (*dump) {
            return cmd_kernel_dump(dump_dataset, dump_block, dump_record, dump_out, dump_verify, dump_cntk, out, err);
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace chcntk::cli
