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

#include "cotrain/toylab.h"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cotrain/io.h"
#include "cotrain/metrics.h"
#include "cotrain/rng.h"

namespace cotrain {
namespace {

Record MakeRecord(const ManifoldSpec& spec, double u, Domain domain, Rng& rng) {
  Record r;
  r.obs = ToyInput(spec, u, domain);
  for (Eigen::Index i = 0; i < r.obs.size(); ++i) r.obs(i) += spec.obs_noise * Normal(rng);
  r.action = domain == Domain::kTarget ? TargetOutput(spec, u) : SourceOutput(u);
  r.domain = domain;
  return r;
}

nlohmann::json IntervalToJson(const Interval& i) { return nlohmann::json::array({i.lo, i.hi}); }

Interval IntervalFromJson(const nlohmann::json& doc, const char* name) {
  if (!doc.is_array() || doc.size() != 2 || !doc[0].is_number() || !doc[1].is_number()) {
    throw ConfigError(std::string("manifold: '") + name + "' must be [lo, hi]");
  }
  return {doc[0].get<double>(), doc[1].get<double>()};
}

}  // namespace

void ManifoldSpec::Validate() const {
  if (!(delta_z >= 0.0)) throw ConfigError("delta_z must be non-negative");
  auto inside = [](const Interval& i) { return i.lo >= 0.0 && i.hi <= 1.0 && i.lo < i.hi; };
  if (!inside(target_u)) throw ConfigError("target u range must be a non-empty interval inside [0, 1]");
  if (!inside(ood_u)) throw ConfigError("ood u range must be a non-empty interval inside [0, 1]");
  // The OOD range is open at its lower end, so touching endpoints are disjoint.
  if (ood_u.lo < target_u.hi && target_u.lo < ood_u.hi) {
    throw ConfigError("target and ood u ranges overlap");
  }
  if (n_source < 1 || n_target < 1) throw ConfigError("sample counts must be at least 1");
  if (!(obs_noise >= 0.0)) throw ConfigError("obs_noise must be non-negative");
}

nlohmann::json ManifoldSpecToJson(const ManifoldSpec& s) {
  return {{"delta_z", s.delta_z},
          {"action_gap", {s.action_gap(0), s.action_gap(1)}},
          {"target_u_range", IntervalToJson(s.target_u)},
          {"ood_u_range", IntervalToJson(s.ood_u)},
          {"n_source", s.n_source},
          {"n_target", s.n_target},
          {"obs_noise", s.obs_noise}};
}

ManifoldSpec ManifoldSpecFromJson(const nlohmann::json& doc) {
  RejectUnknownKeys(doc,
                    {"delta_z", "action_gap", "target_u_range", "ood_u_range", "n_source", "n_target",
                     "obs_noise"},
                    "manifold");
  ManifoldSpec s;
  try {
    s.delta_z = doc.value("delta_z", s.delta_z);
    if (doc.contains("action_gap")) {
      const Interval g = IntervalFromJson(doc["action_gap"], "action_gap");
      s.action_gap = {g.lo, g.hi};
    }
    if (doc.contains("target_u_range")) s.target_u = IntervalFromJson(doc["target_u_range"], "target_u_range");
    if (doc.contains("ood_u_range")) s.ood_u = IntervalFromJson(doc["ood_u_range"], "ood_u_range");
    s.n_source = doc.value("n_source", s.n_source);
    s.n_target = doc.value("n_target", s.n_target);
    s.obs_noise = doc.value("obs_noise", s.obs_noise);
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError(std::string("manifold: wrong value type: ") + e.what());
  }
  s.Validate();
  return s;
}

Vector ToyInput(const ManifoldSpec& spec, double u, Domain domain) {
  Vector x(3);
  x << std::cos(std::numbers::pi * u), std::sin(std::numbers::pi * u),
      domain == Domain::kTarget ? spec.delta_z : 0.0;
  return x;
}

Vector SourceOutput(double u) {
  Vector y(2);
  y << u, 0.5 * std::sin(2.0 * std::numbers::pi * u);
  return y;
}

Vector TargetOutput(const ManifoldSpec& spec, double u) {
  return SourceOutput(u) + Vector(spec.action_gap);
}

ToyData GenManifoldData(const ManifoldSpec& spec, uint64_t seed) {
  spec.Validate();
  std::vector<Record> records;
  records.reserve(static_cast<size_t>(spec.n_target + spec.n_source));
  Vector latent(spec.n_target + spec.n_source);
  Rng target_rng = MakeRng(seed, "toy-target");
  for (int i = 0; i < spec.n_target; ++i) {
    const double u = Uniform(target_rng, spec.target_u.lo, spec.target_u.hi);
    latent(i) = u;
    records.push_back(MakeRecord(spec, u, Domain::kTarget, target_rng));
  }
  Rng source_rng = MakeRng(seed, "toy-source");
  for (int i = 0; i < spec.n_source; ++i) {
    const double u = Uniform(source_rng);
    latent(spec.n_target + i) = u;
    records.push_back(MakeRecord(spec, u, Domain::kSource, source_rng));
  }
  return {LabeledDataset(std::move(records)), latent};
}

LabeledDataset MatchedSupportSample(const ManifoldSpec& spec,
                                    Eigen::Index n_per_domain, uint64_t seed) {
  spec.Validate();
  if (n_per_domain < 1) throw ConfigError("probe sample needs at least one point per domain");
  std::vector<Record> records;
  for (Domain d : {Domain::kTarget, Domain::kSource}) {
    Rng rng = MakeRng(seed, d == Domain::kTarget ? "probe-target" : "probe-source");
    for (Eigen::Index i = 0; i < n_per_domain; ++i) {
      const double u = Uniform(rng, spec.target_u.lo, spec.target_u.hi);
      records.push_back(MakeRecord(spec, u, d, rng));
    }
  }
  return LabeledDataset(std::move(records));
}

std::string_view EvalRegionName(EvalRegion region) {
  return region == EvalRegion::kInDist ? "in-dist" : "ood";
}

EvalRegion ParseEvalRegion(std::string_view name) {
  if (name == "in-dist") return EvalRegion::kInDist;
  if (name == "ood") return EvalRegion::kOod;
  throw ConfigError("unknown region '" + std::string(name) + "' (expected in-dist or ood)");
}

double EvalL2(const Predictor& predict, const ManifoldSpec& spec,
              EvalRegion region, Eigen::Index n_eval, uint64_t seed) {
  spec.Validate();
  if (n_eval < 1) throw ConfigError("n_eval must be positive");
  const Interval range = region == EvalRegion::kInDist ? spec.target_u : spec.ood_u;
  Rng rng = MakeRng(seed, "eval-u", region == EvalRegion::kInDist ? 0 : 1);
  Matrix x(3, n_eval), y(2, n_eval);
  for (Eigen::Index j = 0; j < n_eval; ++j) {
    const double u = Uniform(rng, range.lo, range.hi);
    x.col(j) = ToyInput(spec, u, Domain::kTarget);
    y.col(j) = TargetOutput(spec, u);
  }
  const Matrix pred = predict(x);
  if (pred.rows() != y.rows() || pred.cols() != y.cols()) {
    throw ShapeError("predictor returned " + std::to_string(pred.rows()) + "x" + std::to_string(pred.cols()) +
                     ", expected " + std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
  }
  return (pred - y).colwise().squaredNorm().mean();
}

Predictor ModelPredictor(const TrainedModel& model,
                         const PredictorOptions& options) {
  if (options.n_draws < 1) throw ConfigError("n_draws must be positive");
  if (options.guidance_lambda && !model.conditional) {
    throw ConfigError("guidance needs a model trained with environment labels (cfg or cfg-adda)");
  }
  return [&model, options](const Matrix& x) -> Matrix {
    const Eigen::Index n = x.cols();
    const Eigen::Index draws = options.n_draws;
    Matrix obs(x.rows(), n * draws);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < draws; ++k) obs.col(j * draws + k) = x.col(j);
    }
    ScoreFn score;
    if (model.conditional) {
      const Matrix target = TargetLabel().replicate(1, n * draws);
      score = ModelScore(model, obs, target);
      if (options.guidance_lambda) {
        ScoreFn uncond = ModelScore(model, obs, Matrix::Zero(kLabelDim, n * draws));
        score = GuidedScore(score, uncond, *options.guidance_lambda);
      }
    } else {
      score = ModelScore(model, obs, Matrix());
    }
    const Matrix samples = Sample(score, model.schedule, options.sampler, model.denoiser.output_dim(), n * draws);
    Matrix mean(samples.rows(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
      mean.col(j) = samples.middleCols(j * draws, draws).rowwise().mean();
    }
    return mean;
  };
}

SraResult SraMeasure(const LabeledDataset& probe, const TrainedModel& model,
                     double t, uint64_t seed) {
  if (probe.n_target() == 0 || probe.m_source() == 0) throw ConfigError("SRA needs both domains");
  const Matrix features = model.denoiser.Features(probe.Observations());
  const Matrix pooled = Standardize(features);
  std::vector<Eigen::Index> t_idx, s_idx;
  std::vector<int> labels;
  std::vector<Record> feature_records;
  for (size_t j = 0; j < probe.size(); ++j) {
    const Eigen::Index col = static_cast<Eigen::Index>(j);
    const bool is_target = probe[j].domain == Domain::kTarget;
    (is_target ? t_idx : s_idx).push_back(col);
    labels.push_back(is_target ? 0 : 1);
    feature_records.push_back({pooled.col(col), probe[j].action, probe[j].domain});
  }
  auto gather = [&](const std::vector<Eigen::Index>& idx) {
    Matrix out(pooled.rows(), static_cast<Eigen::Index>(idx.size()));
    for (size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = pooled.col(idx[j]);
    return out;
  };
  SraResult out;
  WassersteinOptions w_opts;
  w_opts.standardize = false;
  out.m_align = Wasserstein(gather(t_idx), gather(s_idx), w_opts);
  out.d_disc = Discernibility(LabeledDataset(std::move(feature_records)), t, model.schedule);
  out.probe_acc = LinearProbe(features, labels, seed);
  return out;
}

}  // namespace cotrain
