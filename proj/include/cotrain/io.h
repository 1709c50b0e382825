// Copyright 2026 The Cotrain Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COTRAIN_IO_H_
#define COTRAIN_IO_H_

#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cotrain/dataset.h"
#include "cotrain/types.h"

namespace cotrain {

// 17 significant digits; round-trips every finite double.
std::string FormatDouble(double value);

// Throws ConfigError naming the first key of `doc` not in `allowed`.
void RejectUnknownKeys(const nlohmann::json& doc,
                       std::initializer_list<std::string_view> allowed,
                       std::string_view context);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& doc);

// One JSON object per line: {"x":[...],"y":[...],"domain":"target"|"source"}.
void WriteDatasetJsonl(std::ostream& out, const LabeledDataset& data);
// Throws ParseError naming the line number and field on malformed input.
LabeledDataset ReadDatasetJsonl(std::istream& in);
LabeledDataset ReadDatasetJsonl(const std::filesystem::path& path);

// Numeric CSV, one row per sample; an optional non-numeric header row is
// skipped. Returns dim x samples.
Matrix ReadFeatureCsv(const std::filesystem::path& path);
// Header a1..a_d, one row per column of `samples`.
std::string SamplesToCsv(const Matrix& samples, std::string_view prefix = "a");

}  // namespace cotrain

#endif  // COTRAIN_IO_H_
