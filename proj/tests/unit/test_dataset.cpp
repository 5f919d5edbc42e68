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


#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "chcntk/dataset.hpp"
#include "chcntk/error.hpp"

using namespace chcntk;

namespace {

std::string scratch_file(const std::string &name) {
    std::filesystem::create_directories(CHCNTK_SCRATCH_DIR);
    return std::string(CHCNTK_SCRATCH_DIR) + "/" + name;
}

DatasetRecord make_record(int seed) {
    const ComplexMatrix h = ComplexMatrix::Random(6, 4);
    const ComplexMatrix x = ComplexMatrix::Constant(6, 4, cdouble(seed, 1.0));
    Mask mask = Mask::Constant(6, 4, false);
    mask(0, 0) = mask(3, 2) = true;
    return {h, ResourceGrid(x), ResourceGrid(x.cwiseProduct(h)), mask, 10.0 * seed};
}

}  // namespace

TEST_SUITE("dataset") {
    TEST_CASE("records and manifest round trip") {
        Dataset ds;
        ds.manifest = {{"seed", 7}, {"note", "unit"}};
        ds.records.push_back(make_record(1));
        ds.records.push_back(make_record(2));
        const auto path = scratch_file("round_trip.chgrid");
        write_dataset(path, ds);
        CHECK(std::filesystem::exists(manifest_path(path)));

        const Dataset back = read_dataset(path);
        CHECK(back.manifest["seed"] == 7);
        CHECK(back.manifest["records"] == 2);
        REQUIRE(back.records.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(back.records[i].h_true == ds.records[i].h_true);
            CHECK(back.records[i].transmitted.data() == ds.records[i].transmitted.data());
            CHECK(back.records[i].received.data() == ds.records[i].received.data());
            CHECK((back.records[i].mask == ds.records[i].mask).all());
            CHECK(back.records[i].snr_db == ds.records[i].snr_db);
        }
    }

    TEST_CASE("infinite snr survives the round trip") {
        Dataset ds;
        ds.records.push_back(make_record(1));
        ds.records[0].snr_db = std::numeric_limits<double>::infinity();
        const auto path = scratch_file("inf_snr.chgrid");
        write_dataset(path, ds);
        CHECK(read_dataset(path).records[0].snr_db == std::numeric_limits<double>::infinity());
    }

    TEST_CASE("estimates round trip with the method header") {
        const auto path = scratch_file("estimates.chgrid");
        const std::vector<ComplexMatrix> est{ComplexMatrix::Random(3, 2), ComplexMatrix::Random(3, 2)};
        write_estimates(path, est, {{"method", "knn"}, {"k", 4}});
        const auto back = read_estimates(path);
        REQUIRE(back.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(back[i].first["method"] == "knn");
            CHECK(back[i].first["k"] == 4);
            CHECK(back[i].second == est[i]);
        }
    }

    TEST_CASE("missing files and truncated datasets") {
        CHECK_THROWS_AS((void)read_dataset(scratch_file("does_not_exist.chgrid")), Error);

        Dataset ds;
        ds.records.push_back(make_record(1));
        const auto path = scratch_file("truncated.chgrid");
        write_dataset(path, ds);
        const auto size = std::filesystem::file_size(path);
        std::filesystem::resize_file(path, size - 10);
        try {
            (void)read_dataset(path);
            FAIL("truncated dataset was accepted");
        } catch (const Error &e) { CHECK(e.code() == ErrorCode::Format); }
    }
}
