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

#include "chcntk/container.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "chcntk/error.hpp"

namespace chcntk {
namespace {

template<typename T>
void put_le(std::vector<char> &buf, T value) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) { std::reverse(bytes, bytes + sizeof(T)); }
    buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

template<typename T>
T get_le(const char *p) {
    char bytes[sizeof(T)];
    std::memcpy(bytes, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) { std::reverse(bytes, bytes + sizeof(T)); }
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

void write_framed(std::ostream &os, nlohmann::json &header, Eigen::Index rows, Eigen::Index cols,
                  const char *dtype, const std::vector<char> &payload) {
    header["dims"] = {rows, cols};
    header["dtype"] = dtype;
    const std::string text = header.dump();
    std::vector<char> prefix(kContainerMagic, kContainerMagic + sizeof(kContainerMagic));
    put_le<std::uint64_t>(prefix, text.size());
    os.write(prefix.data(), static_cast<std::streamsize>(prefix.size()));
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!os) { throw Error(ErrorCode::Io, "failed writing grid container"); }
}

void read_exact(std::istream &is, char *dst, std::size_t n, const char *what) {
    is.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n) {
        throw Error(ErrorCode::Format, std::string("truncated grid container (") + what + ")");
    }
}

}  // namespace

void write_container(std::ostream &os, const ComplexMatrix &values, nlohmann::json header) {
    std::vector<char> payload;
    payload.reserve(static_cast<std::size_t>(values.size()) * 16);
    for (Eigen::Index m = 0; m < values.rows(); ++m) {
        for (Eigen::Index n = 0; n < values.cols(); ++n) {
            put_le<double>(payload, values(m, n).real());
            put_le<double>(payload, values(m, n).imag());
        }
    }
    write_framed(os, header, values.rows(), values.cols(), "c128", payload);
}

void write_container(std::ostream &os, const Mask &mask, nlohmann::json header) {
    std::vector<char> payload;
    payload.reserve(static_cast<std::size_t>(mask.size()));
    for (Eigen::Index m = 0; m < mask.rows(); ++m) {
        for (Eigen::Index n = 0; n < mask.cols(); ++n) { payload.push_back(mask(m, n) ? 1 : 0); }
    }
    write_framed(os, header, mask.rows(), mask.cols(), "b8", payload);
}

void write_container(std::ostream &os, const ResourceGrid &grid, nlohmann::json header) {
    header["subcarrier_spacing_hz"] = grid.subcarrier_spacing_hz();
    header["symbol_duration_s"] = grid.symbol_duration_s();
    write_container(os, grid.data(), std::move(header));
}

std::optional<ContainerRecord> read_container(std::istream &is) {
    char magic[sizeof(kContainerMagic)];
    is.read(magic, sizeof(magic));
    if (is.gcount() == 0 && is.eof()) { return std::nullopt; }
    if (is.gcount() != static_cast<std::streamsize>(sizeof(magic)) ||
        std::memcmp(magic, kContainerMagic, sizeof(magic)) != 0) {
        throw Error(ErrorCode::Format, "bad grid container magic");
    }
    char len_bytes[8];
    read_exact(is, len_bytes, sizeof(len_bytes), "header length");
    const auto header_len = get_le<std::uint64_t>(len_bytes);
    if (header_len > (1u << 24)) { throw Error(ErrorCode::Format, "grid container header too large"); }
    std::string text(header_len, '\0');
    read_exact(is, text.data(), text.size(), "header");

    ContainerRecord rec;
    try {
        rec.header = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::Format, std::string("grid container header is not valid JSON: ") + e.what());
    }
    const auto &dims = rec.header.at("dims");
    if (!dims.is_array() || dims.size() != 2) { throw Error(ErrorCode::Format, "grid container dims must be [rows, cols]"); }
    const auto rows = dims[0].get<Eigen::Index>();
    const auto cols = dims[1].get<Eigen::Index>();
    if (rows < 1 || cols < 1 || rows * cols > (Eigen::Index{1} << 28)) {
        throw Error(ErrorCode::Format, "grid container dims out of range");
    }
    const std::string dtype = rec.header.value("dtype", "");
    if (dtype == "c128") {
        std::vector<char> payload(static_cast<std::size_t>(rows * cols) * 16);
        read_exact(is, payload.data(), payload.size(), "payload");
        rec.values.resize(rows, cols);
        const char *p = payload.data();
        for (Eigen::Index m = 0; m < rows; ++m) {
            for (Eigen::Index n = 0; n < cols; ++n, p += 16) {
                rec.values(m, n) = {get_le<double>(p), get_le<double>(p + 8)};
            }
        }
    } else if (dtype == "b8") {
        std::vector<char> payload(static_cast<std::size_t>(rows * cols));
        read_exact(is, payload.data(), payload.size(), "payload");
        rec.mask.resize(rows, cols);
        const char *p = payload.data();
        for (Eigen::Index m = 0; m < rows; ++m) {
            for (Eigen::Index n = 0; n < cols; ++n, ++p) {
                if (*p != 0 && *p != 1) { throw Error(ErrorCode::Format, "mask payload byte is not 0 or 1"); }
                rec.mask(m, n) = *p == 1;
            }
        }
    } else {
        throw Error(ErrorCode::Format, "unsupported grid container dtype '" + dtype + "'");
    }
    return rec;
}

ResourceGrid to_resource_grid(const ContainerRecord &rec) {
    if (rec.is_mask()) { throw Error(ErrorCode::Format, "expected a c128 record, found a mask"); }
    return ResourceGrid(rec.values, rec.header.value("subcarrier_spacing_hz", kDefaultSubcarrierSpacingHz),
                        rec.header.value("symbol_duration_s", kDefaultSymbolDurationS));
}

void write_grid_file(const std::string &path, const ResourceGrid &grid, nlohmann::json header) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) { throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing"); }
    write_container(os, grid, std::move(header));
}

ResourceGrid read_grid_file(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) { throw Error(ErrorCode::Io, "cannot open '" + path + "'"); }
    auto rec = read_container(is);
    if (!rec) { throw Error(ErrorCode::Format, "'" + path + "' contains no grid record"); }
    return to_resource_grid(*rec);
}

}  // namespace chcntk
