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

#include "cotrain/io.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace cotrain {
namespace {

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

bool ParseNumber(std::string_view field, double* out) {
  const std::string s = Trim(field);
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

Vector JsonVector(const nlohmann::json& value, size_t line, const char* field) {
  if (!value.is_array()) {
    throw ParseError("line " + std::to_string(line) + ": field '" + field + "' must be an array");
  }
  Vector v(static_cast<Eigen::Index>(value.size()));
  for (size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) {
      throw ParseError("line " + std::to_string(line) + ": field '" + field + "' has a non-numeric entry");
    }
    v(static_cast<Eigen::Index>(i)) = value[i].get<double>();
  }
  return v;
}

void AppendArray(std::string& out, const Vector& v) {
  out += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += FormatDouble(v(i));
  }
  out += ']';
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw NumericError("cannot format number");
  return std::string(buf, ptr);
}

void RejectUnknownKeys(const nlohmann::json& doc,
                       std::initializer_list<std::string_view> allowed,
                       std::string_view context) {
  if (!doc.is_object()) {
    throw ConfigError(std::string(context) + ": expected a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) {
      throw ConfigError(std::string(context) + ": unknown key '" + key + "'");
    }
  }
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

nlohmann::json ReadJsonFile(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& doc) {
  WriteTextFile(path, doc.dump(2) + "\n");
}

void WriteDatasetJsonl(std::ostream& out, const LabeledDataset& data) {
  std::string line;
  for (const Record& r : data.records()) {
    line.clear();
    line += "{\"x\":";
    AppendArray(line, r.obs);
    line += ",\"y\":";
    AppendArray(line, r.action);
    line += ",\"domain\":\"";
    line += DomainName(r.domain);
    line += "\"}\n";
    out << line;
  }
}

LabeledDataset ReadDatasetJsonl(std::istream& in) {
  std::vector<Record> records;
  std::string text;
  size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (Trim(text).empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError("line " + std::to_string(line_no) + ": expected an object");
    for (const char* key : {"x", "y", "domain"}) {
      if (!doc.contains(key)) {
        throw ParseError("line " + std::to_string(line_no) + ": missing field '" + key + "'");
      }
    }
    try {
      RejectUnknownKeys(doc, {"x", "y", "domain"}, "line " + std::to_string(line_no));
    } catch (const ConfigError& e) {
      throw ParseError(e.what());
    }
    Record r;
    r.obs = JsonVector(doc["x"], line_no, "x");
    r.action = JsonVector(doc["y"], line_no, "y");
    if (!doc["domain"].is_string()) {
      throw ParseError("line " + std::to_string(line_no) + ": field 'domain' must be a string");
    }
    try {
      r.domain = ParseDomain(doc["domain"].get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!records.empty() && (r.obs.size() != records.front().obs.size() ||
                             r.action.size() != records.front().action.size())) {
      throw ParseError("line " + std::to_string(line_no) + ": dimensions differ from line 1");
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw ParseError("dataset file has no records");
  return LabeledDataset(std::move(records));
}

LabeledDataset ReadDatasetJsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return ReadDatasetJsonl(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Matrix ReadFeatureCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      double v = 0.0;
      if (!ParseNumber(field, &v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": non-numeric field '" +
                       Trim(field) + "'");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path.string() + ": no data rows");
  Matrix out(static_cast<Eigen::Index>(rows.front().size()), static_cast<Eigen::Index>(rows.size()));
  for (size_t j = 0; j < rows.size(); ++j) {
    for (size_t i = 0; i < rows[j].size(); ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
    }
  }
  return out;
}

std::string SamplesToCsv(const Matrix& samples, std::string_view prefix) {
  std::string out;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    if (i > 0) out += ',';
    out += prefix;
    out += std::to_string(i + 1);
  }
  out += '\n';
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
      if (i > 0) out += ',';
      out += FormatDouble(samples(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace cotrain
