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

#include "cotrain/dataset.h"

#include <string>
#include <utility>

namespace cotrain {

std::string_view DomainName(Domain domain) {
  return domain == Domain::kTarget ? "target" : "source";
}

Domain ParseDomain(std::string_view name) {
  if (name == "target") return Domain::kTarget;
  if (name == "source") return Domain::kSource;
  throw ParseError("unknown domain '" + std::string(name) +
                   "' (expected target or source)");
}

LabeledDataset::LabeledDataset(std::vector<Record> records)
    : records_(std::move(records)) {
  if (records_.empty()) throw ConfigError("dataset has no samples");
  d_obs_ = records_.front().obs.size();
  d_act_ = records_.front().action.size();
  if (d_act_ == 0) throw ShapeError("dataset actions are empty");
  for (size_t i = 0; i < records_.size(); ++i) {
    const Record& r = records_[i];
    if (r.obs.size() != d_obs_ || r.action.size() != d_act_) {
      throw ShapeError("dataset record " + std::to_string(i) +
                       " has inconsistent dimensions");
    }
    if (r.domain == Domain::kTarget) {
      ++n_target_;
    } else {
      ++m_source_;
    }
  }
}

std::vector<size_t> LabeledDataset::Indices(Domain domain) const {
  std::vector<size_t> out;
  out.reserve(count(domain));
  for (size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].domain == domain) out.push_back(i);
  }
  return out;
}

Matrix LabeledDataset::Observations() const {
  Matrix m(d_obs_, records_.size());
  for (size_t i = 0; i < records_.size(); ++i) m.col(i) = records_[i].obs;
  return m;
}

Matrix LabeledDataset::Actions() const {
  Matrix m(d_act_, records_.size());
  for (size_t i = 0; i < records_.size(); ++i) m.col(i) = records_[i].action;
  return m;
}

Matrix LabeledDataset::Observations(Domain domain) const {
  const std::vector<size_t> idx = Indices(domain);
  Matrix m(d_obs_, idx.size());
  for (size_t j = 0; j < idx.size(); ++j) m.col(j) = records_[idx[j]].obs;
  return m;
}

Matrix LabeledDataset::Actions(Domain domain) const {
  const std::vector<size_t> idx = Indices(domain);
  Matrix m(d_act_, idx.size());
  for (size_t j = 0; j < idx.size(); ++j) m.col(j) = records_[idx[j]].action;
  return m;
}

bool operator==(const LabeledDataset& a, const LabeledDataset& b) {
  if (a.size() != b.size() || a.d_obs() != b.d_obs() ||
      a.d_act() != b.d_act()) {
    return false;
  }
  for (size_t i = 0; i < a.size(); ++i) {
    const Record& x = a[i];
    const Record& y = b[i];
    if (x.domain != y.domain || x.obs != y.obs || x.action != y.action) {
      return false;
    }
  }
  return true;
}

}  // namespace cotrain
