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

#include "chcntk/dataset.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "chcntk/container.hpp"
#include "chcntk/error.hpp"

namespace chcntk {
namespace {

std::ofstream open_out(const std::string &path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) { throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing"); }
    return os;
}

std::ifstream open_in(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) { throw Error(ErrorCode::Io, "cannot open '" + path + "'"); }
    return is;
}

ContainerRecord expect_record(std::istream &is, const std::string &role, std::size_t index) {
    auto rec = read_container(is);
    if (!rec) { throw Error(ErrorCode::Format, "dataset ends inside record " + std::to_string(index)); }
    if (rec->header.value("role", "") != role || rec->header.value("record", std::size_t{0}) != index) {
        throw Error(ErrorCode::Format, "record " + std::to_string(index) + ": expected role '" + role + "'");
    }
    return std::move(*rec);
}

}  // namespace

std::string manifest_path(const std::string &dataset_path) { return dataset_path + ".manifest.json"; }

void write_dataset(const std::string &path, const Dataset &dataset) {
    {
        auto os = open_out(path);
        for (std::size_t i = 0; i < dataset.records.size(); ++i) {
            const auto &r = dataset.records[i];
            auto tag = [&](const char *role) {
                nlohmann::json h;
                h["role"] = role;
                h["record"] = i;
                h["snr_db"] = std::isinf(r.snr_db) ? nlohmann::json("inf") : nlohmann::json(r.snr_db);
                return h;
            };
            write_container(os, ResourceGrid(r.h_true, r.received.subcarrier_spacing_hz(), r.received.symbol_duration_s()),
                            tag("h_true"));
            write_container(os, r.transmitted, tag("x"));
            write_container(os, r.received, tag("y"));
            write_container(os, r.mask, tag("mask"));
        }
    }
    auto ms = open_out(manifest_path(path));
    nlohmann::json manifest = dataset.manifest;
    manifest["records"] = dataset.records.size();
    ms << manifest.dump(2) << '\n';
    if (!ms) { throw Error(ErrorCode::Io, "failed writing manifest for '" + path + "'"); }
}

Dataset read_dataset(const std::string &path) {
    Dataset ds;
    {
        auto ms = open_in(manifest_path(path));
        try {
            ds.manifest = nlohmann::json::parse(ms);
        } catch (const nlohmann::json::exception &e) {
            throw Error(ErrorCode::Format, "manifest for '" + path + "' is not valid JSON: " + e.what());
        }
    }
    auto is = open_in(path);
    for (std::size_t i = 0;; ++i) {
        if (is.peek() == std::char_traits<char>::eof()) { break; }
        const auto h = expect_record(is, "h_true", i);
        const auto x = expect_record(is, "x", i);
        const auto y = expect_record(is, "y", i);
        const auto m = expect_record(is, "mask", i);
        if (!m.is_mask()) { throw Error(ErrorCode::Format, "record " + std::to_string(i) + ": mask is not b8"); }
        const auto &snr = y.header.at("snr_db");
        DatasetRecord rec{h.values, to_resource_grid(x), to_resource_grid(y), m.mask,
                          snr.is_string() ? std::numeric_limits<double>::infinity() : snr.get<double>()};
        if (rec.h_true.rows() != rec.mask.rows() || rec.h_true.cols() != rec.mask.cols() ||
            rec.transmitted.rows() != rec.mask.rows() || rec.received.cols() != rec.mask.cols()) {
            throw Error(ErrorCode::Format, "record " + std::to_string(i) + ": grid shapes differ");
        }
        ds.records.push_back(std::move(rec));
    }
    if (ds.manifest.contains("records") && ds.manifest["records"].get<std::size_t>() != ds.records.size()) {
        throw Error(ErrorCode::Format, "manifest record count does not match '" + path + "'");
    }
    return ds;
}

void write_estimates(const std::string &path, const std::vector<ComplexMatrix> &estimates,
                     const nlohmann::json &method_header) {
    auto os = open_out(path);
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        nlohmann::json h = method_header;
        h["role"] = "estimate";
        h["record"] = i;
        write_container(os, estimates[i], h);
    }
}

std::vector<std::pair<nlohmann::json, ComplexMatrix>> read_estimates(const std::string &path) {
    auto is = open_in(path);
    std::vector<std::pair<nlohmann::json, ComplexMatrix>> out;
    while (auto rec = read_container(is)) {
        if (rec->is_mask()) { throw Error(ErrorCode::Format, "estimate file contains a mask record"); }
        out.emplace_back(std::move(rec->header), std::move(rec->values));
    }
    return out;
}

}  // namespace chcntk
