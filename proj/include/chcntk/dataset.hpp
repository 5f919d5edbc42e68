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

#include <string>
#include <vector>

#include <json.hpp>

#include "chcntk/grid.hpp"

namespace chcntk {

/// One simulated grid: ground truth H, transmitted X, received Y, pilot mask.
struct DatasetRecord {
    ComplexMatrix h_true;
    ResourceGrid transmitted;
    ResourceGrid received;
    Mask mask;
    double snr_db = 0.0;
};

struct Dataset {
    nlohmann::json manifest;
    std::vector<DatasetRecord> records;
};

/// Path of the manifest that accompanies a dataset file.
std::string manifest_path(const std::string &dataset_path);

/// Writes each record as four grid containers tagged with "role"
/// (h_true, x, y, mask) and "record", plus the JSON manifest sidecar.
void write_dataset(const std::string &path, const Dataset &dataset);
Dataset read_dataset(const std::string &path);

/// Estimates in the grid container format, one per record, with the method
/// tag and its parameters merged into each header.
void write_estimates(const std::string &path, const std::vector<ComplexMatrix> &estimates,
                     const nlohmann::json &method_header);
std::vector<std::pair<nlohmann::json, ComplexMatrix>> read_estimates(const std::string &path);

}  // namespace chcntk
