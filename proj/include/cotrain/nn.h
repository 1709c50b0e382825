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

#ifndef COTRAIN_NN_H_
#define COTRAIN_NN_H_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotrain/rng.h"
#include "cotrain/types.h"

namespace cotrain {

// Backward called with a cache from a different forward / older weights.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

// Activations recorded by Mlp::Forward. Only valid for the parameter version
// it was produced with.
struct MlpCache {
  uint64_t version = 0;
  const void* owner = nullptr;
  std::vector<Matrix> inputs;  // input of each layer (after side concat)
  std::vector<Matrix> pre;     // pre-activation of each layer
};

struct MlpGradients {
  std::vector<Layer> layers;
  Matrix input;  // d loss / d x
  Matrix side;   // d loss / d side (empty when side_dim == 0)

  void Scale(double factor);
  void Add(const MlpGradients& other);
};

// Fully connected network, SiLU on hidden layers and identity on the output.
//
// Layers [0, encoder_split) form the encoder f_phi; their output is the
// feature vector z. Layer encoder_split reads the concatenation [z; side], so
// extra per-sample inputs (noisy action, timestep embedding, environment
// label) enter the head without passing through the encoder. With
// encoder_split == 0 the side input is appended to x itself.
class Mlp {
 public:
  Mlp() = default;
  // Zero weights and biases. layer_dims = {d_in, hidden..., d_out}.
  Mlp(std::vector<Eigen::Index> layer_dims, Eigen::Index side_dim = 0,
      int encoder_split = 0);

  // Glorot-uniform weights, zero biases; the output layer is zeroed when
  // `zero_output` is set.
  static Mlp Initialized(std::vector<Eigen::Index> layer_dims,
                         Eigen::Index side_dim, int encoder_split, Rng& rng,
                         bool zero_output);

  // x: d_in x B, side: side_dim x B (may be empty when side_dim == 0).
  Matrix Forward(const Matrix& x, const Matrix& side, MlpCache* cache) const;
  Matrix Forward(const Matrix& x) const { return Forward(x, Matrix(), nullptr); }
  // Encoder output z (d_in rows when encoder_split == 0).
  Matrix Features(const Matrix& x) const;

  // Gradients of sum(output .* grad_output) (+ sum(z .* grad_features) when
  // given) w.r.t. all parameters, x and side.
  MlpGradients Backward(const MlpCache& cache, const Matrix& grad_output,
                        const Matrix* grad_features = nullptr) const;

  int num_layers() const { return static_cast<int>(layers_.size()); }
  const std::vector<Eigen::Index>& layer_dims() const { return dims_; }
  Eigen::Index side_dim() const { return side_dim_; }
  int encoder_split() const { return encoder_split_; }
  Eigen::Index input_dim() const { return dims_.front(); }
  Eigen::Index output_dim() const { return dims_.back(); }
  Eigen::Index feature_dim() const { return dims_[static_cast<size_t>(encoder_split_)]; }
  const std::vector<Layer>& layers() const { return layers_; }
  uint64_t version() const { return version_; }

  // Mutable access bumps the version so outstanding caches become stale.
  Layer& mutable_layer(int i);

  MlpGradients ZeroGradients(Eigen::Index batch) const;
  Eigen::Index num_parameters() const;
  // Row-major weights then bias, layer by layer.
  Vector Parameters() const;
  void SetParameters(const Vector& flat);

  friend bool operator==(const Mlp& a, const Mlp& b);

 private:
  std::vector<Eigen::Index> dims_;
  Eigen::Index side_dim_ = 0;
  int encoder_split_ = 0;
  std::vector<Layer> layers_;
  uint64_t version_ = 0;
};

// Checkpoint document: layer_dims, side_dim, activation tag, encoder_split and
// per-layer row-major weight arrays.
nlohmann::json MlpToJson(const Mlp& net);
Mlp MlpFromJson(const nlohmann::json& doc);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamState {
 public:
  AdamState() = default;
  AdamState(const Mlp& net, AdamConfig config);

  // One bias-corrected Adam update of `net` in place.
  void Step(Mlp& net, const MlpGradients& grads);

  int64_t step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<Layer> m_;
  std::vector<Layer> v_;
  int64_t step_ = 0;
};

// Identity forward; the backward pass multiplies the incoming gradient by
// -strength. strength == 0 detaches.
Matrix GradientReversal(const Matrix& grad, double strength);

// Interleaved [sin(f_0 t), cos(f_0 t), sin(f_1 t), ...] with frequencies
// geometric from 1 to 1000. `dim` must be even.
Vector TimestepEmbedding(double t, Eigen::Index dim);
// One column per entry of `t`.
Matrix TimestepEmbedding(const Vector& t, Eigen::Index dim);

inline double Sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// log(1 + exp(x)) without overflow.
inline double Softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace cotrain

#endif  // COTRAIN_NN_H_
