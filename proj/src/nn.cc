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

#include "cotrain/nn.h"

#include <cmath>
#include <string>
#include <utility>

namespace cotrain {
namespace {

Matrix Silu(const Matrix& z) {
  return z.unaryExpr([](double v) { return v * Sigmoid(v); });
}

Matrix SiluGrad(const Matrix& z) {
  return z.unaryExpr([](double v) {
    const double s = Sigmoid(v);
    return s * (1.0 + v * (1.0 - s));
  });
}

}  // namespace

void MlpGradients::Scale(double factor) {
  for (Layer& l : layers) {
    l.weight *= factor;
    l.bias *= factor;
  }
  input *= factor;
  side *= factor;
}

void MlpGradients::Add(const MlpGradients& other) {
  if (other.layers.size() != layers.size()) {
    throw ShapeError("MlpGradients::Add: layer count differs");
  }
  for (size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += other.layers[i].weight;
    layers[i].bias += other.layers[i].bias;
  }
}

Mlp::Mlp(std::vector<Eigen::Index> layer_dims, Eigen::Index side_dim,
         int encoder_split)
    : dims_(std::move(layer_dims)),
      side_dim_(side_dim),
      encoder_split_(encoder_split) {
  if (dims_.size() < 2) throw ShapeError("Mlp needs at least one layer");
  for (Eigen::Index d : dims_) {
    if (d < 1) throw ShapeError("Mlp layer dims must be positive");
  }
  if (side_dim_ < 0) throw ShapeError("Mlp side_dim must be >= 0");
  const int n_layers = static_cast<int>(dims_.size()) - 1;
  if (encoder_split_ < 0 || encoder_split_ >= n_layers) {
    throw ShapeError("Mlp encoder_split must be in [0, num_layers)");
  }
  layers_.resize(static_cast<size_t>(n_layers));
  for (int i = 0; i < n_layers; ++i) {
    const Eigen::Index in = dims_[i] + (i == encoder_split_ ? side_dim_ : 0);
    layers_[i].weight = Matrix::Zero(dims_[i + 1], in);
    layers_[i].bias = Vector::Zero(dims_[i + 1]);
  }
}

Mlp Mlp::Initialized(std::vector<Eigen::Index> layer_dims,
                     Eigen::Index side_dim, int encoder_split, Rng& rng,
                     bool zero_output) {
  Mlp net(std::move(layer_dims), side_dim, encoder_split);
  for (int i = 0; i < net.num_layers(); ++i) {
    Layer& l = net.layers_[static_cast<size_t>(i)];
    if (zero_output && i + 1 == net.num_layers()) continue;
    const double limit = std::sqrt(6.0 / static_cast<double>(l.weight.rows() + l.weight.cols()));
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
        l.weight(r, c) = Uniform(rng, -limit, limit);
      }
    }
  }
  return net;
}

Matrix Mlp::Forward(const Matrix& x, const Matrix& side,
                    MlpCache* cache) const {
  if (x.rows() != input_dim()) {
    throw ShapeError("Mlp::Forward: input has " + std::to_string(x.rows()) +
                     " rows, expected " + std::to_string(input_dim()));
  }
  if (side_dim_ > 0 && (side.rows() != side_dim_ || side.cols() != x.cols())) {
    throw ShapeError("Mlp::Forward: side input shape mismatch");
  }
  if (cache != nullptr) {
    cache->version = version_;
    cache->owner = this;
    cache->inputs.assign(layers_.size(), Matrix());
    cache->pre.assign(layers_.size(), Matrix());
  }
  Matrix h = x;
  for (int i = 0; i < num_layers(); ++i) {
    const Layer& l = layers_[static_cast<size_t>(i)];
    if (i == encoder_split_ && side_dim_ > 0) {
      Matrix joined(h.rows() + side_dim_, h.cols());
      joined << h, side;
      h = std::move(joined);
    }
    Matrix z = (l.weight * h).colwise() + l.bias;
    if (cache != nullptr) {
      cache->inputs[static_cast<size_t>(i)] = std::move(h);
      cache->pre[static_cast<size_t>(i)] = z;
    }
    h = i + 1 < num_layers() ? Silu(z) : std::move(z);
  }
  return h;
}

Matrix Mlp::Features(const Matrix& x) const {
  if (x.rows() != input_dim()) throw ShapeError("Mlp::Features: input shape mismatch");
  Matrix h = x;
  for (int i = 0; i < encoder_split_; ++i) {
    const Layer& l = layers_[static_cast<size_t>(i)];
    h = Silu((l.weight * h).colwise() + l.bias);
  }
  return h;
}

MlpGradients Mlp::Backward(const MlpCache& cache, const Matrix& grad_output,
                           const Matrix* grad_features) const {
  if (cache.owner != this || cache.version != version_ ||
      cache.inputs.size() != layers_.size()) {
    throw ContractError("Mlp::Backward: cache is stale or from another network");
  }
  const Eigen::Index batch = cache.inputs.front().cols();
  if (grad_output.rows() != output_dim() || grad_output.cols() != batch) {
    throw ShapeError("Mlp::Backward: grad_output shape mismatch");
  }
  if (grad_features != nullptr &&
      (grad_features->rows() != feature_dim() || grad_features->cols() != batch)) {
    throw ShapeError("Mlp::Backward: grad_features shape mismatch");
  }
  MlpGradients grads;
  grads.layers.resize(layers_.size());
  Matrix grad = grad_output;
  for (int i = num_layers() - 1; i >= 0; --i) {
    const size_t li = static_cast<size_t>(i);
    if (i + 1 < num_layers()) grad = grad.cwiseProduct(SiluGrad(cache.pre[li]));
    grads.layers[li].weight = grad * cache.inputs[li].transpose();
    grads.layers[li].bias = grad.rowwise().sum();
    Matrix grad_in = layers_[li].weight.transpose() * grad;
    if (i == encoder_split_) {
      if (side_dim_ > 0) {
        grads.side = grad_in.bottomRows(side_dim_);
        grad_in = grad_in.topRows(dims_[li]).eval();
      }
      if (grad_features != nullptr) grad_in += *grad_features;
    }
    grad = std::move(grad_in);
  }
  grads.input = std::move(grad);
  return grads;
}

Layer& Mlp::mutable_layer(int i) {
  ++version_;
  return layers_.at(static_cast<size_t>(i));
}

MlpGradients Mlp::ZeroGradients(Eigen::Index batch) const {
  MlpGradients g;
  for (const Layer& l : layers_) {
    g.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()),
                        Vector::Zero(l.bias.size())});
  }
  g.input = Matrix::Zero(input_dim(), batch);
  if (side_dim_ > 0) g.side = Matrix::Zero(side_dim_, batch);
  return g;
}

Eigen::Index Mlp::num_parameters() const {
  Eigen::Index n = 0;
  for (const Layer& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

Vector Mlp::Parameters() const {
  Vector flat(num_parameters());
  Eigen::Index k = 0;
  for (const Layer& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat(k++) = l.weight(r, c);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat(k++) = l.bias(r);
  }
  return flat;
}

void Mlp::SetParameters(const Vector& flat) {
  CheckSameSize(flat.size(), num_parameters(), "Mlp::SetParameters");
  ++version_;
  Eigen::Index k = 0;
  for (Layer& l : layers_) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat(k++);
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = flat(k++);
  }
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.dims_ != b.dims_ || a.side_dim_ != b.side_dim_ ||
      a.encoder_split_ != b.encoder_split_) {
    return false;
  }
  for (size_t i = 0; i < a.layers_.size(); ++i) {
    if (a.layers_[i].weight != b.layers_[i].weight ||
        a.layers_[i].bias != b.layers_[i].bias) {
      return false;
    }
  }
  return true;
}

nlohmann::json MlpToJson(const Mlp& net) {
  nlohmann::json doc;
  doc["layer_dims"] = net.layer_dims();
  doc["side_dim"] = net.side_dim();
  doc["activation"] = "silu";
  doc["encoder_split"] = net.encoder_split();
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : net.layers()) {
    std::vector<double> w;
    w.reserve(static_cast<size_t>(l.weight.size()));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.push_back(l.weight(r, c));
    }
    layers.push_back({{"rows", l.weight.rows()},
                      {"cols", l.weight.cols()},
                      {"weight", w},
                      {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
  }
  doc["layers"] = std::move(layers);
  return doc;
}

Mlp MlpFromJson(const nlohmann::json& doc) {
  try {
    if (doc.at("activation").get<std::string>() != "silu") {
      throw ParseError("checkpoint: unsupported activation");
    }
    Mlp net(doc.at("layer_dims").get<std::vector<Eigen::Index>>(),
            doc.at("side_dim").get<Eigen::Index>(),
            doc.at("encoder_split").get<int>());
    const nlohmann::json& layers = doc.at("layers");
    if (layers.size() != static_cast<size_t>(net.num_layers())) {
      throw ParseError("checkpoint: layer count does not match layer_dims");
    }
    for (int i = 0; i < net.num_layers(); ++i) {
      const nlohmann::json& lj = layers[static_cast<size_t>(i)];
      Layer& l = net.mutable_layer(i);
      const auto w = lj.at("weight").get<std::vector<double>>();
      const auto b = lj.at("bias").get<std::vector<double>>();
      if (lj.at("rows").get<Eigen::Index>() != l.weight.rows() ||
          lj.at("cols").get<Eigen::Index>() != l.weight.cols() ||
          static_cast<Eigen::Index>(w.size()) != l.weight.size() ||
          static_cast<Eigen::Index>(b.size()) != l.bias.size()) {
        throw ParseError("checkpoint: layer " + std::to_string(i) + " has the wrong shape");
      }
      size_t k = 0;
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = w[k++];
      }
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = b[static_cast<size_t>(r)];
    }
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

AdamState::AdamState(const Mlp& net, AdamConfig config) : config_(config) {
  for (const Layer& l : net.layers()) {
    m_.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  v_ = m_;
}

void AdamState::Step(Mlp& net, const MlpGradients& grads) {
  if (grads.layers.size() != m_.size() ||
      static_cast<int>(m_.size()) != net.num_layers()) {
    throw ShapeError("AdamState::Step: layer count mismatch");
  }
  ++step_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double lr = config_.lr;
  const double eps = config_.eps;
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    if (g.rows() != param.rows() || g.cols() != param.cols()) {
      throw ShapeError("AdamState::Step: gradient shape mismatch");
    }
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (int i = 0; i < net.num_layers(); ++i) {
    const size_t li = static_cast<size_t>(i);
    Layer& l = net.mutable_layer(i);
    update(l.weight, m_[li].weight, v_[li].weight, grads.layers[li].weight);
    update(l.bias, m_[li].bias, v_[li].bias, grads.layers[li].bias);
  }
}

Matrix GradientReversal(const Matrix& grad, double strength) {
  if (!(strength >= 0.0)) throw ConfigError("gradient reversal strength must be >= 0");
  return -strength * grad;
}

Vector TimestepEmbedding(double t, Eigen::Index dim) {
  Vector tv(1);
  tv(0) = t;
  return TimestepEmbedding(tv, dim).col(0);
}

Matrix TimestepEmbedding(const Vector& t, Eigen::Index dim) {
  if (dim < 2 || dim % 2 != 0) {
    throw ShapeError("timestep embedding dim must be even and >= 2, got " + std::to_string(dim));
  }
  const Eigen::Index half = dim / 2;
  Matrix out(dim, t.size());
  for (Eigen::Index k = 0; k < half; ++k) {
    const double freq =
        half == 1 ? 1.0 : std::pow(1000.0, static_cast<double>(k) / static_cast<double>(half - 1));
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      out(2 * k, j) = std::sin(freq * t(j));
      out(2 * k + 1, j) = std::cos(freq * t(j));
    }
  }
  return out;
}

}  // namespace cotrain
