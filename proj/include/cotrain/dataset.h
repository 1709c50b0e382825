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

#ifndef COTRAIN_DATASET_H_
#define COTRAIN_DATASET_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "cotrain/types.h"

namespace cotrain {

enum class Domain { kTarget, kSource };

std::string_view DomainName(Domain domain);
// Accepts "target" / "source"; throws ParseError otherwise.
Domain ParseDomain(std::string_view name);

struct Record {
  Vector obs;
  Vector action;
  Domain domain = Domain::kTarget;
};

// Paired (observation, action, domain) samples: the small target set D_T and
// the large source set D_S held in one sequence.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  // Throws ShapeError on inconsistent dimensions, ConfigError when empty.
  explicit LabeledDataset(std::vector<Record> records);

  std::span<const Record> records() const { return records_; }
  const Record& operator[](size_t i) const { return records_[i]; }
  size_t size() const { return records_.size(); }
  size_t n_target() const { return n_target_; }
  size_t m_source() const { return m_source_; }
  size_t count(Domain domain) const {
    return domain == Domain::kTarget ? n_target_ : m_source_;
  }
  Eigen::Index d_obs() const { return d_obs_; }
  Eigen::Index d_act() const { return d_act_; }

  std::vector<size_t> Indices(Domain domain) const;
  // Column-stacked observations / actions (dim x count).
  Matrix Observations() const;
  Matrix Actions() const;
  Matrix Observations(Domain domain) const;
  Matrix Actions(Domain domain) const;

  friend bool operator==(const LabeledDataset& a, const LabeledDataset& b);

 private:
  std::vector<Record> records_;
  size_t n_target_ = 0;
  size_t m_source_ = 0;
  Eigen::Index d_obs_ = 0;
  Eigen::Index d_act_ = 0;
};

}  // namespace cotrain

#endif  // COTRAIN_DATASET_H_
