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

#include "cotrain/cotrain.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <string>
#include <utility>

#include "cotrain/io.h"
#include "cotrain/metrics.h"

namespace cotrain {
namespace {

constexpr int kEncoderSplit = 2;

Matrix GatherColumns(const Matrix& m, const std::vector<Eigen::Index>& idx) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = m.col(idx[j]);
  return out;
}

void ScatterAddColumns(Matrix& dst, const Matrix& src, const std::vector<Eigen::Index>& idx) {
  for (size_t j = 0; j < idx.size(); ++j) dst.col(idx[j]) += src.col(static_cast<Eigen::Index>(j));
}

nlohmann::json ScheduleToJson(const NoiseSchedule& s) {
  return {{"kind", "vp-cosine"}, {"t_min", s.t_min}, {"t_max", s.t_max}};
}

NoiseSchedule ScheduleFromJson(const nlohmann::json& doc) {
  RejectUnknownKeys(doc, {"kind", "t_min", "t_max"}, "schedule");
  NoiseSchedule s;
  if (doc.value("kind", std::string("vp-cosine")) != "vp-cosine") {
    throw ConfigError("schedule: unsupported kind '" + doc["kind"].get<std::string>() + "'");
  }
  s.t_min = doc.value("t_min", s.t_min);
  s.t_max = doc.value("t_max", s.t_max);
  s.Validate();
  return s;
}

nlohmann::json LossToJson(const LossRecord& r) {
  return {{"step", r.step}, {"total", r.total}, {"dsm", r.dsm}, {"ot", r.ot}, {"disc", r.disc}};
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kVanilla: return "vanilla";
    case Method::kOt: return "ot";
    case Method::kAdda: return "adda";
    case Method::kCfg: return "cfg";
    case Method::kCfgAdda: return "cfg-adda";
  }
  return "vanilla";
}

Method ParseMethod(std::string_view name) {
  for (Method m : {Method::kVanilla, Method::kOt, Method::kAdda, Method::kCfg, Method::kCfgAdda}) {
    if (MethodName(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected vanilla, ot, adda, cfg or cfg-adda)");
}

std::string_view DiscDirectionName(DiscDirection direction) {
  return direction == DiscDirection::kReverse ? "reverse" : "promote";
}

DiscDirection ParseDiscDirection(std::string_view name) {
  if (name == "reverse") return DiscDirection::kReverse;
  if (name == "promote") return DiscDirection::kPromote;
  throw ConfigError("unknown disc_direction '" + std::string(name) + "' (expected reverse or promote)");
}

void TrainConfig::Validate() const {
  if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("w must lie in [0, 1], got " + std::to_string(w));
  if (batch < 1) throw ConfigError("batch must be positive");
  if (w > 0.0 && w < 1.0 && batch < 2) throw ConfigError("batch must hold both domains when 0 < w < 1");
  if (steps < 0) throw ConfigError("steps must be non-negative");
  if (!(lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(p_drop >= 0.0 && p_drop < 1.0)) throw ConfigError("p_drop must lie in [0, 1)");
  if (!(lambda_disc >= 0.0) || !(lambda_ot >= 0.0)) throw ConfigError("loss weights must be non-negative");
  if (warmup < 0 || warmup > steps) {
    throw ConfigError("warmup (" + std::to_string(warmup) + ") must lie in [0, steps=" + std::to_string(steps) + "]");
  }
  if (!(grl_strength >= 0.0)) throw ConfigError("grl_strength must be non-negative");
  if (hidden < 1 || disc_hidden < 1) throw ConfigError("hidden widths must be positive");
  if (time_embed_dim < 2 || time_embed_dim % 2 != 0) throw ConfigError("time_embed_dim must be even and >= 2");
  if (!(ot_epsilon > 0.0)) throw ConfigError("ot_epsilon must be positive");
  if (log_every < 1) throw ConfigError("log_every must be positive");
}

nlohmann::json TrainConfigToJson(const TrainConfig& c) {
  return {{"method", MethodName(c.method)},
          {"w", c.w},
          {"batch", c.batch},
          {"steps", c.steps},
          {"lr", c.lr},
          {"seed", c.seed},
          {"p_drop", c.p_drop},
          {"lambda_disc", c.lambda_disc},
          {"lambda_ot", c.lambda_ot},
          {"warmup", c.warmup},
          {"disc_direction", DiscDirectionName(c.disc_direction)},
          {"grl_strength", c.grl_strength},
          {"hidden", c.hidden},
          {"time_embed_dim", c.time_embed_dim},
          {"disc_hidden", c.disc_hidden},
          {"ot_epsilon", c.ot_epsilon},
          {"log_every", c.log_every}};
}

TrainConfig TrainConfigFromJson(const nlohmann::json& doc) {
  RejectUnknownKeys(doc,
                    {"method", "w", "batch", "steps", "lr", "seed", "p_drop", "lambda_disc", "lambda_ot",
                     "warmup", "disc_direction", "grl_strength", "hidden", "time_embed_dim", "disc_hidden",
                     "ot_epsilon", "log_every"},
                    "train config");
  TrainConfig c;
  try {
    if (doc.contains("method")) c.method = ParseMethod(doc["method"].get<std::string>());
    if (doc.contains("disc_direction")) {
      c.disc_direction = ParseDiscDirection(doc["disc_direction"].get<std::string>());
    }
    c.w = doc.value("w", c.w);
    c.batch = doc.value("batch", c.batch);
    c.steps = doc.value("steps", c.steps);
    c.lr = doc.value("lr", c.lr);
    c.seed = doc.value("seed", c.seed);
    c.p_drop = doc.value("p_drop", c.p_drop);
    c.lambda_disc = doc.value("lambda_disc", c.lambda_disc);
    c.lambda_ot = doc.value("lambda_ot", c.lambda_ot);
    c.warmup = doc.value("warmup", c.warmup);
    c.grl_strength = doc.value("grl_strength", c.grl_strength);
    c.hidden = doc.value("hidden", c.hidden);
    c.time_embed_dim = doc.value("time_embed_dim", c.time_embed_dim);
    c.disc_hidden = doc.value("disc_hidden", c.disc_hidden);
    c.ot_epsilon = doc.value("ot_epsilon", c.ot_epsilon);
    c.log_every = doc.value("log_every", c.log_every);
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError(std::string("train config: wrong value type: ") + e.what());
  }
  return c;
}

Eigen::Index Batch::count(Domain d) const {
  return static_cast<Eigen::Index>(std::count(domains.begin(), domains.end(), d));
}

int TargetCount(double w, int batch) {
  int n_t = static_cast<int>(std::lround(w * batch));
  if (w > 0.0) n_t = std::max(n_t, 1);
  if (w < 1.0) n_t = std::min(n_t, batch - 1);
  return std::clamp(n_t, 0, batch);
}

Batch SampleMixedBatch(const LabeledDataset& data, double w, int batch, Rng& rng) {
  if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("w must lie in [0, 1]");
  if (batch < 1) throw ConfigError("batch must be positive");
  const int n_t = TargetCount(w, batch);
  const int n_s = batch - n_t;
  const std::vector<size_t> target = data.Indices(Domain::kTarget);
  const std::vector<size_t> source = data.Indices(Domain::kSource);
  if (n_t > 0 && target.empty()) throw ConfigError("batch needs target samples but the target split is empty");
  if (n_s > 0 && source.empty()) throw ConfigError("batch needs source samples but the source split is empty");
  std::vector<size_t> picks;
  picks.reserve(static_cast<size_t>(batch));
  for (int i = 0; i < n_t; ++i) {
    picks.push_back(target[std::uniform_int_distribution<size_t>(0, target.size() - 1)(rng)]);
  }
  for (int i = 0; i < n_s; ++i) {
    picks.push_back(source[std::uniform_int_distribution<size_t>(0, source.size() - 1)(rng)]);
  }
  std::shuffle(picks.begin(), picks.end(), rng);
  Batch out;
  out.obs.resize(data.d_obs(), batch);
  out.actions.resize(data.d_act(), batch);
  out.domains.reserve(static_cast<size_t>(batch));
  for (int j = 0; j < batch; ++j) {
    const Record& r = data[picks[static_cast<size_t>(j)]];
    out.obs.col(j) = r.obs;
    out.actions.col(j) = r.action;
    out.domains.push_back(r.domain);
  }
  return out;
}

Matrix OneHotLabels(const std::vector<Domain>& domains) {
  Matrix out = Matrix::Zero(kLabelDim, static_cast<Eigen::Index>(domains.size()));
  for (size_t j = 0; j < domains.size(); ++j) {
    out(domains[j] == Domain::kTarget ? 0 : 1, static_cast<Eigen::Index>(j)) = 1.0;
  }
  return out;
}

Vector TargetLabel() {
  Vector v = Vector::Zero(kLabelDim);
  v(0) = 1.0;
  return v;
}

Mlp MakeDenoiser(Eigen::Index d_obs, Eigen::Index d_act, int hidden,
                 int time_embed_dim, bool with_labels, Rng& rng) {
  const Eigen::Index h = hidden;
  const Eigen::Index side = d_act + time_embed_dim + (with_labels ? kLabelDim : 0);
  return Mlp::Initialized({d_obs, h, h, h, d_act}, side, kEncoderSplit, rng, true);
}

Mlp MakeDiscriminator(Eigen::Index feature_dim, int hidden, Rng& rng) {
  return Mlp::Initialized({feature_dim, hidden, hidden, 1}, 0, 0, rng, false);
}

Matrix DenoiserSideInput(const Matrix& a_t, const Vector& t,
                         int time_embed_dim, const Matrix& labels) {
  CheckSameSize(a_t.cols(), t.size(), "DenoiserSideInput times");
  if (labels.size() > 0) CheckSameSize(a_t.cols(), labels.cols(), "DenoiserSideInput labels");
  Matrix side(a_t.rows() + time_embed_dim + labels.rows(), a_t.cols());
  side.topRows(a_t.rows()) = a_t;
  side.middleRows(a_t.rows(), time_embed_dim) = TimestepEmbedding(t, time_embed_dim);
  if (labels.rows() > 0) side.bottomRows(labels.rows()) = labels;
  return side;
}

DsmForwardPass DsmForward(const Mlp& net, const Batch& batch,
                          const Matrix& labels, const NoiseSchedule& schedule,
                          int time_embed_dim, Rng& rng) {
  const Eigen::Index n = batch.size();
  if (n == 0) throw ShapeError("dsm loss on an empty batch");
  Vector t(n);
  for (Eigen::Index j = 0; j < n; ++j) t(j) = Uniform(rng, schedule.t_min, schedule.t_max);
  const Matrix eps = NormalMatrix(rng, batch.actions.rows(), n);
  Matrix a_t(batch.actions.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const AlphaSigma c = Coefficients(schedule, t(j));
    a_t.col(j) = c.alpha * batch.actions.col(j) + c.sigma * eps.col(j);
  }
  DsmForwardPass pass;
  const Matrix side = DenoiserSideInput(a_t, t, time_embed_dim, labels);
  const Matrix diff = net.Forward(batch.obs, side, &pass.cache) - eps;
  const double inv_n = 1.0 / static_cast<double>(n);
  pass.loss = diff.squaredNorm() * inv_n;
  pass.grad_output = (2.0 * inv_n) * diff;
  pass.features = pass.cache.inputs[static_cast<size_t>(net.encoder_split())].topRows(net.feature_dim());
  return pass;
}

LossAndGradients DsmLoss(const Mlp& net, const Batch& batch,
                         const Matrix& labels, const NoiseSchedule& schedule,
                         int time_embed_dim, Rng& rng) {
  DsmForwardPass pass = DsmForward(net, batch, labels, schedule, time_embed_dim, rng);
  return {pass.loss, net.Backward(pass.cache, pass.grad_output)};
}

FeatureLoss OtLoss(const Matrix& z_target, const Matrix& z_source,
                   double epsilon_scale, int max_iter, double tol) {
  if (z_target.cols() == 0 || z_source.cols() == 0) throw ShapeError("ot loss needs two non-empty feature sets");
  CheckSameSize(z_target.rows(), z_source.rows(), "ot loss feature dim");
  const Matrix cost = SquaredDistances(z_target, z_source);
  FeatureLoss out;
  out.grad_target = Matrix::Zero(z_target.rows(), z_target.cols());
  out.grad_source = Matrix::Zero(z_source.rows(), z_source.cols());
  const double mean_cost = cost.mean();
  if (!(mean_cost > 0.0)) return out;  // all features coincide
  const Vector a = Vector::Constant(z_target.cols(), 1.0 / static_cast<double>(z_target.cols()));
  const Vector b = Vector::Constant(z_source.cols(), 1.0 / static_cast<double>(z_source.cols()));
  const SinkhornResult ot = Sinkhorn(cost, a, b, epsilon_scale * mean_cost, max_iter, tol);
  const Matrix& p = ot.plan;
  out.loss = (p.array() * cost.array()).sum();
  out.converged = ot.converged;
  const Vector row_mass = p.rowwise().sum();
  const Vector col_mass = p.colwise().sum().transpose();
  out.grad_target = 2.0 * (z_target * row_mass.asDiagonal() - z_source * p.transpose());
  out.grad_source = 2.0 * (z_source * col_mass.asDiagonal() - z_target * p);
  return out;
}

DiscLoss DiscriminatorLoss(const Mlp& disc, const Matrix& z_target,
                           const Matrix& z_source) {
  const Eigen::Index nt = z_target.cols();
  const Eigen::Index ns = z_source.cols();
  if (nt == 0 || ns == 0) throw ShapeError("discriminator loss needs two non-empty feature sets");
  Matrix z(z_target.rows(), nt + ns);
  z << z_target, z_source;
  MlpCache cache;
  const Matrix logits = disc.Forward(z, Matrix(), &cache);
  DiscLoss out;
  Matrix grad(1, nt + ns);
  for (Eigen::Index j = 0; j < nt; ++j) {
    out.loss += Softplus(logits(0, j)) / static_cast<double>(nt);
    grad(0, j) = Sigmoid(logits(0, j)) / static_cast<double>(nt);
  }
  for (Eigen::Index j = nt; j < nt + ns; ++j) {
    out.loss += Softplus(-logits(0, j)) / static_cast<double>(ns);
    grad(0, j) = -Sigmoid(-logits(0, j)) / static_cast<double>(ns);
  }
  out.disc_grads = disc.Backward(cache, grad);
  out.grad_target = out.disc_grads.input.leftCols(nt);
  out.grad_source = out.disc_grads.input.rightCols(ns);
  return out;
}

nlohmann::json TrainedModelToJson(const TrainedModel& model) {
  nlohmann::json doc = {{"denoiser", MlpToJson(model.denoiser)},
                        {"conditional", model.conditional},
                        {"time_embed_dim", model.time_embed_dim},
                        {"schedule", ScheduleToJson(model.schedule)}};
  if (model.has_discriminator) doc["discriminator"] = MlpToJson(model.discriminator);
  return doc;
}

TrainedModel TrainedModelFromJson(const nlohmann::json& doc) {
  RejectUnknownKeys(doc, {"denoiser", "discriminator", "conditional", "time_embed_dim", "schedule"}, "checkpoint");
  for (const char* key : {"denoiser", "conditional", "time_embed_dim", "schedule"}) {
    if (!doc.contains(key)) throw ParseError(std::string("checkpoint: missing key '") + key + "'");
  }
  TrainedModel m;
  try {
    m.denoiser = MlpFromJson(doc["denoiser"]);
    m.conditional = doc["conditional"].get<bool>();
    m.time_embed_dim = doc["time_embed_dim"].get<int>();
    if (doc.contains("discriminator")) {
      m.discriminator = MlpFromJson(doc["discriminator"]);
      m.has_discriminator = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  m.schedule = ScheduleFromJson(doc["schedule"]);
  const Eigen::Index expected_side =
      m.denoiser.output_dim() + m.time_embed_dim + (m.conditional ? kLabelDim : 0);
  if (m.denoiser.side_dim() != expected_side) {
    throw ParseError("checkpoint: denoiser side input has " + std::to_string(m.denoiser.side_dim()) +
                     " rows, expected " + std::to_string(expected_side));
  }
  return m;
}

TrainResult Train(const LabeledDataset& data, const TrainConfig& config,
                  const NoiseSchedule& schedule) {
  config.Validate();
  schedule.Validate();
  if (config.w > 0.0 && data.n_target() == 0) throw ConfigError("w > 0 but the dataset has no target samples");
  if (config.w < 1.0 && data.m_source() == 0) throw ConfigError("w < 1 but the dataset has no source samples");
  const auto start = std::chrono::steady_clock::now();

  const bool labelled = UsesLabels(config.method);
  const bool adversarial = UsesDiscriminator(config.method);
  const bool transport = config.method == Method::kOt;

  TrainResult result;
  TrainedModel& model = result.model;
  model.conditional = labelled;
  model.time_embed_dim = config.time_embed_dim;
  model.schedule = schedule;
  Rng init_rng = MakeRng(config.seed, "init-denoiser");
  model.denoiser = MakeDenoiser(data.d_obs(), data.d_act(), config.hidden, config.time_embed_dim, labelled, init_rng);
  AdamState adam(model.denoiser, AdamConfig{.lr = config.lr});
  AdamState disc_adam;
  if (adversarial) {
    Rng disc_rng = MakeRng(config.seed, "init-disc");
    model.discriminator = MakeDiscriminator(model.denoiser.feature_dim(), config.disc_hidden, disc_rng);
    model.has_discriminator = true;
    disc_adam = AdamState(model.discriminator, AdamConfig{.lr = config.lr});
  }

  Rng batch_rng = MakeRng(config.seed, "batch");
  Rng noise_rng = MakeRng(config.seed, "noise");
  Rng drop_rng = MakeRng(config.seed, "dropout");
  TrainReport& report = result.report;

  for (int step = 0; step < config.steps; ++step) {
    const Batch batch = SampleMixedBatch(data, config.w, config.batch, batch_rng);
    Matrix labels;
    if (labelled) {
      labels = OneHotLabels(batch.domains);
      for (Eigen::Index j = 0; j < labels.cols(); ++j) {
        if (Uniform(drop_rng) < config.p_drop) labels.col(j).setZero();
      }
    }
    DsmForwardPass pass =
        DsmForward(model.denoiser, batch, labels, schedule, config.time_embed_dim, noise_rng);
    LossRecord rec;
    rec.step = step;
    rec.dsm = pass.loss;

    Matrix feature_grad;
    const bool aux_active = step >= config.warmup && (adversarial || transport) &&
                            batch.count(Domain::kTarget) > 0 && batch.count(Domain::kSource) > 0;
    if (aux_active) {
      std::vector<Eigen::Index> t_idx, s_idx;
      for (size_t j = 0; j < batch.domains.size(); ++j) {
        (batch.domains[j] == Domain::kTarget ? t_idx : s_idx).push_back(static_cast<Eigen::Index>(j));
      }
      const Matrix z_t = GatherColumns(pass.features, t_idx);
      const Matrix z_s = GatherColumns(pass.features, s_idx);
      feature_grad = Matrix::Zero(pass.features.rows(), pass.features.cols());
      if (transport) {
        const FeatureLoss ot = OtLoss(z_t, z_s, config.ot_epsilon);
        if (!ot.converged) {
          if (report.ot_unconverged == 0) {
            std::cerr << "warning: Sinkhorn did not converge at step " << step << "; using the last iterate\n";
          }
          ++report.ot_unconverged;
        }
        rec.ot = ot.loss;
        ScatterAddColumns(feature_grad, config.lambda_ot * ot.grad_target, t_idx);
        ScatterAddColumns(feature_grad, config.lambda_ot * ot.grad_source, s_idx);
      }
      if (adversarial) {
        DiscLoss dl = DiscriminatorLoss(model.discriminator, z_t, z_s);
        rec.disc = dl.loss;
        // The discriminator descends its own loss; the encoder receives the
        // reversed (or, for the ablation, unreversed) feature gradient.
        dl.disc_grads.Scale(config.lambda_disc);
        disc_adam.Step(model.discriminator, dl.disc_grads);
        const double lam = config.lambda_disc;
        Matrix g_t, g_s;
        if (config.disc_direction == DiscDirection::kReverse) {
          g_t = GradientReversal(lam * dl.grad_target, config.grl_strength);
          g_s = GradientReversal(lam * dl.grad_source, config.grl_strength);
        } else {
          g_t = config.grl_strength * lam * dl.grad_target;
          g_s = config.grl_strength * lam * dl.grad_source;
        }
        ScatterAddColumns(feature_grad, g_t, t_idx);
        ScatterAddColumns(feature_grad, g_s, s_idx);
      }
    }
    rec.total = rec.dsm + config.lambda_ot * rec.ot + config.lambda_disc * rec.disc;
    if (!std::isfinite(rec.total) || rec.total > 1e6) {
      throw NumericError("training diverged at step " + std::to_string(step) +
                         " (total loss " + FormatDouble(rec.total) + ")");
    }
    const MlpGradients grads =
        model.denoiser.Backward(pass.cache, pass.grad_output, aux_active ? &feature_grad : nullptr);
    adam.Step(model.denoiser, grads);

    report.final_losses = rec;
    if (step % config.log_every == 0 || step + 1 == config.steps) report.trajectory.push_back(rec);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ScoreFn ModelScore(const TrainedModel& model, Matrix obs, Matrix labels) {
  if (model.conditional && labels.size() == 0) {
    throw ConfigError("conditional model needs labels (zero columns for the null token)");
  }
  if (!model.conditional && labels.size() > 0) throw ConfigError("unconditional model takes no labels");
  if (obs.rows() != model.denoiser.input_dim()) {
    throw ShapeError("observation dim " + std::to_string(obs.rows()) + " does not match the model input dim " +
                     std::to_string(model.denoiser.input_dim()));
  }
  if (labels.size() > 0) CheckSameSize(obs.cols(), labels.cols(), "ModelScore labels");
  return [&model, obs = std::move(obs), labels = std::move(labels)](const Matrix& a_t, double t) -> Matrix {
    CheckSameSize(a_t.cols(), obs.cols(), "ModelScore batch");
    const AlphaSigma c = Coefficients(model.schedule, t);
    const Vector tv = Vector::Constant(a_t.cols(), t);
    const Matrix side = DenoiserSideInput(a_t, tv, model.time_embed_dim, labels);
    return -model.denoiser.Forward(obs, side, nullptr) / c.sigma;
  };
}

void WriteRunDirectory(const std::filesystem::path& dir,
                       const nlohmann::json& resolved_config,
                       TrainResult& result) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path ckpt = dir / "checkpoint.json";
  result.report.checkpoint_path = ckpt.string();
  WriteJsonFile(dir / "config.json", resolved_config);
  WriteTextFile(ckpt, TrainedModelToJson(result.model).dump() + "\n");
  std::string csv = "step,total,dsm,ot,disc\n";
  for (const LossRecord& r : result.report.trajectory) {
    csv += std::to_string(r.step) + "," + FormatDouble(r.total) + "," + FormatDouble(r.dsm) + "," +
           FormatDouble(r.ot) + "," + FormatDouble(r.disc) + "\n";
  }
  WriteTextFile(dir / "losses.csv", csv);
  nlohmann::json report = {{"final_losses", LossToJson(result.report.final_losses)},
                           {"trajectory_points", result.report.trajectory.size()},
                           {"wall_seconds", result.report.wall_seconds},
                           {"ot_unconverged", result.report.ot_unconverged},
                           {"checkpoint_path", result.report.checkpoint_path}};
  WriteJsonFile(dir / "report.json", report);
}

}  // namespace cotrain
