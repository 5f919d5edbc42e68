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

#include "chcntk/eval.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "chcntk/error.hpp"
#include "chcntk/parallel.hpp"
#include "chcntk/rng.hpp"

namespace chcntk {

double nmse_ratio(const ComplexMatrix &h_true, const ComplexMatrix &h_hat) {
    if (h_true.rows() != h_hat.rows() || h_true.cols() != h_hat.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "NMSE operands differ in shape");
    }
    const double ref = h_true.squaredNorm();
    if (!(ref > 0.0)) { throw Error(ErrorCode::ZeroReference, "reference channel has zero norm"); }
    return (h_true - h_hat).squaredNorm() / ref;
}

double ratio_to_db(double ratio) {
    if (ratio <= kExactRatioFloor) { return -std::numeric_limits<double>::infinity(); }
    return 10.0 * std::log10(ratio);
}

double nmse_db(const ComplexMatrix &h_true, const ComplexMatrix &h_hat) {
    return ratio_to_db(nmse_ratio(h_true, h_hat));
}

std::string format_number(double v) {
    if (std::isinf(v)) { return v < 0 ? "-inf" : "inf"; }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void SweepConfig::validate() const {
    if (realizations < 1) { throw Error(ErrorCode::InvalidArgument, "realizations must be >= 1"); }
    if (methods.empty() || snr_db.empty() || patterns.empty()) {
        throw Error(ErrorCode::InvalidArgument, "sweep needs at least one method, SNR and pattern");
    }
    if (rows < 1 || cols < 1) { throw Error(ErrorCode::InvalidArgument, "grid dimensions must be >= 1"); }
    for (double s : snr_db) {
        if (std::isnan(s) || s == -std::numeric_limits<double>::infinity()) {
            throw Error(ErrorCode::InvalidArgument, "SNR values must be finite or +inf");
        }
    }
    for (const auto &p : patterns) { (void)p.make(rows, cols); }
    method_options.cntk.cntk.validate();
}

const SweepRow &SweepResult::at(std::string_view method, double snr_db, int pilots_per_rb) const {
    for (const auto &r : rows) {
        if (r.method == method && r.snr_db == snr_db && r.pilots_per_rb == pilots_per_rb) { return r; }
    }
    throw Error(ErrorCode::IndexOutOfRange, "no sweep row for " + std::string(method));
}

Observation simulate_observation(const SweepConfig &cfg, int realization, std::size_t snr_index,
                                 const PatternSpec &pattern_spec) {
    const auto r = static_cast<std::uint64_t>(realization);
    const TdlProfile profile(cfg.taps, cfg.doppler_hz, derive_seed(cfg.seed, {0, r}));
    auto channel = generate_channel(profile, cfg.rows, cfg.cols, cfg.subcarrier_spacing_hz, cfg.symbol_duration_s);
    auto transmitted = make_qpsk_grid(cfg.rows, cfg.cols, derive_seed(cfg.seed, {1, r}), cfg.subcarrier_spacing_hz,
                                      cfg.symbol_duration_s);
    const NoiseSpec noise{cfg.snr_db.at(snr_index), derive_seed(cfg.seed, {2, r, snr_index})};
    auto received = transmit(channel, transmitted, noise);
    auto pattern = pattern_spec.make(cfg.rows, cfg.cols);
    auto sparse = ls_estimate(received, transmitted, pattern);
    return {std::move(channel), std::move(transmitted), std::move(received), std::move(pattern), std::move(sparse)};
}

SweepResult run_sweep(const SweepConfig &cfg) {
    cfg.validate();
    const std::size_t n_methods = cfg.methods.size();
    const std::size_t n_snr = cfg.snr_db.size();
    const std::size_t n_pat = cfg.patterns.size();
    const auto n_real = static_cast<std::size_t>(cfg.realizations);

    // Work unit = (pattern, snr, realization); every method runs on the same data.
    const std::size_t units = n_pat * n_snr * n_real;
    std::vector<double> ratio(units * n_methods);
    std::vector<double> seconds(units * n_methods);

    MethodOptions opts = cfg.method_options;
    opts.cntk.threads = 1;

    parallel_for(units, cfg.threads, [&](std::size_t u) {
        const std::size_t r = u % n_real;
        const std::size_t s = (u / n_real) % n_snr;
        const std::size_t p = u / (n_real * n_snr);
        const auto obs = simulate_observation(cfg, static_cast<int>(r), s, cfg.patterns[p]);
        for (std::size_t k = 0; k < n_methods; ++k) {
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const ComplexMatrix h_hat = run_method(cfg.methods[k], obs.sparse, opts);
                seconds[u * n_methods + k] =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                ratio[u * n_methods + k] = nmse_ratio(obs.channel.h, h_hat);
            } catch (const Error &e) {
                std::ostringstream where;
                where << "sweep cell (method=" << method_tag(cfg.methods[k]) << ", snr_db=" << cfg.snr_db[s]
                      << ", pattern=" << p << ", realization=" << r << "): " << e.what();
                throw Error(e.code(), where.str());
            }
        }
    });

    SweepResult result;
    for (std::size_t k = 0; k < n_methods; ++k) {
        for (std::size_t p = 0; p < n_pat; ++p) {
            const int per_rb =
                static_cast<int>(std::lround(cfg.patterns[p].make(cfg.rows, cfg.cols).pilots_per_rb()));
            for (std::size_t s = 0; s < n_snr; ++s) {
                SweepRow row;
                row.method = std::string(method_tag(cfg.methods[k]));
                row.snr_db = cfg.snr_db[s];
                row.pilots_per_rb = per_rb;
                row.realizations = cfg.realizations;
                row.seed = cfg.seed;
                double sum_ratio = 0.0;
                double sum_s = 0.0;
                for (std::size_t r = 0; r < n_real; ++r) {
                    const std::size_t u = (p * n_snr + s) * n_real + r;
                    sum_ratio += ratio[u * n_methods + k];
                    sum_s += seconds[u * n_methods + k];
                    row.per_realization_db.push_back(ratio_to_db(ratio[u * n_methods + k]));
                }
                row.nmse_db = ratio_to_db(sum_ratio / static_cast<double>(n_real));
                row.mean_solve_s = cfg.timing ? sum_s / static_cast<double>(n_real) : 0.0;
                result.rows.push_back(std::move(row));
            }
        }
    }
    return result;
}

std::string to_csv(const SweepResult &result) {
    std::string out = kSweepCsvHeader;
    out += '\n';
    for (const auto &r : result.rows) {
        out += r.method + ',' + format_number(r.snr_db) + ',' + std::to_string(r.pilots_per_rb) + ',' +
               format_number(r.nmse_db) + ',' + format_number(r.mean_solve_s) + ',' + std::to_string(r.realizations) +
               ',' + std::to_string(r.seed) + '\n';
    }
    return out;
}

namespace {

double parse_csv_double(const std::string &s) {
    if (s == "-inf") { return -std::numeric_limits<double>::infinity(); }
    if (s == "inf") { return std::numeric_limits<double>::infinity(); }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw Error(ErrorCode::Format, "bad number '" + s + "' in sweep CSV");
    }
    return v;
}

}  // namespace

SweepResult parse_sweep_csv(const std::string &text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != kSweepCsvHeader) {
        throw Error(ErrorCode::Format, "sweep CSV header mismatch");
    }
    SweepResult result;
    while (std::getline(is, line)) {
        if (line.empty()) { continue; }
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) { f.push_back(cell); }
        if (f.size() != 7) { throw Error(ErrorCode::Format, "sweep CSV row needs 7 fields: " + line); }
        SweepRow r;
        r.method = f[0];
        r.snr_db = parse_csv_double(f[1]);
        r.pilots_per_rb = std::stoi(f[2]);
        r.nmse_db = parse_csv_double(f[3]);
        r.mean_solve_s = parse_csv_double(f[4]);
        r.realizations = std::stoi(f[5]);
        r.seed = std::stoull(f[6]);
        result.rows.push_back(std::move(r));
    }
    return result;
}

std::string to_plot_series(const SweepResult &result) {
    std::string out;
    std::string current;
    for (const auto &r : result.rows) {
        const std::string key = r.method + " pilots_per_rb=" + std::to_string(r.pilots_per_rb);
        if (key != current) {
            if (!current.empty()) { out += '\n'; }
            out += "# " + key + "\n# snr_db nmse_db\n";
            current = key;
        }
        out += format_number(r.snr_db) + ' ' + format_number(r.nmse_db) + '\n';
    }
    return out;
}

TimingStats time_method(Method method, const SparseChannelEstimate &sparse, int repeats,
                        const MethodOptions &options) {
    if (repeats < 3) { throw Error(ErrorCode::InvalidArgument, "timing needs at least 3 repeats"); }
    run_method(method, sparse, options);  // warm-up
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(repeats));
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const ComplexMatrix h = run_method(method, sparse, options);
        const auto t1 = std::chrono::steady_clock::now();
        (void)h;
        samples.push_back(std::max(std::chrono::duration<double>(t1 - t0).count(),
                                   std::numeric_limits<double>::min()));
    }
    double mean = 0.0;
    for (double s : samples) { mean += s; }
    mean /= repeats;
    double var = 0.0;
    for (double s : samples) { var += (s - mean) * (s - mean); }
    return {mean, std::sqrt(var / (repeats - 1)), repeats};
}

}  // namespace chcntk
