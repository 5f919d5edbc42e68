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

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "chcntk/grid.hpp"

namespace chcntk {

/// Grid container layout:
///   8 bytes   magic "CHGRID01"
///   8 bytes   header length, unsigned little-endian
///   header    UTF-8 JSON object with at least "dims": [rows, cols] and
///             "dtype": "c128" (complex) or "b8" (boolean mask)
///   payload   row-major cells; c128 = (re, im) float64 little-endian,
///             b8 = one byte per cell (0 or 1)
inline constexpr char kContainerMagic[8] = {'C', 'H', 'G', 'R', 'I', 'D', '0', '1'};

struct ContainerRecord {
    nlohmann::json header;
    ComplexMatrix values;  // c128 records
    Mask mask;             // b8 records

    [[nodiscard]] bool is_mask() const { return header.value("dtype", "") == "b8"; }
};

void write_container(std::ostream &os, const ComplexMatrix &values, nlohmann::json header = nlohmann::json::object());
void write_container(std::ostream &os, const Mask &mask, nlohmann::json header = nlohmann::json::object());
void write_container(std::ostream &os, const ResourceGrid &grid, nlohmann::json header = nlohmann::json::object());

/// Reads the next record; returns nullopt at a clean end of stream.
std::optional<ContainerRecord> read_container(std::istream &is);

/// Rebuilds a ResourceGrid from a c128 record, using the spacing metadata
/// stored in its header when present.
ResourceGrid to_resource_grid(const ContainerRecord &rec);

void write_grid_file(const std::string &path, const ResourceGrid &grid,
                     nlohmann::json header = nlohmann::json::object());
ResourceGrid read_grid_file(const std::string &path);

}  // namespace chcntk
