// Copyright 2026 The P-PET Authors
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

#ifndef PPET__RECURRENT_HPP_
#define PPET__RECURRENT_HPP_

#include "ppet/geometry.hpp"
#include "ppet/stream.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ppet::predictors
{

using Feature = std::array<double, 3>;

/// A feature sequence with its regression target.
struct FeatureSample
{
  std::vector<Feature> steps;
  double label{0.0};
};

/// Per-step features in the frame of the target line:
///   [signed distance to the line, velocity along the inward normal, velocity along the line]
/// computed from forward differences, so a window of n points yields n - 1 steps. Invariant to
/// a joint translation of window and line.
std::vector<Feature> line_frame_features(const stream::SlidingWindow & window, const geometry::TargetLine & line);

struct Normalization
{
  Feature mean{0.0, 0.0, 0.0};
  Feature scale{1.0, 1.0, 1.0};

  static Normalization fit(std::span<const FeatureSample> samples);
  Feature apply(const Feature & f) const;
};

/// Gated recurrent regressor:
///   z = sigmoid(Wz x + Uz h + bz)
///   r = sigmoid(Wr x + Ur h + br)
///   c = tanh(Wc x + Uc (r * h) + bc)
///   h' = (1 - z) * h + z * c
/// and a linear head on the final hidden state followed by softplus.
class RecurrentRegressor
{
public:
  static constexpr int kInputSize = 3;

  struct Block
  {
    std::string name;
    int rows;
    int cols;
    std::size_t offset;
    std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  };

  explicit RecurrentRegressor(int hidden_size = 32);

  /// Uniform(-1/sqrt(H), 1/sqrt(H)) weights, zero biases.
  static RecurrentRegressor random(int hidden_size, std::uint64_t seed);

  int hidden_size() const { return hidden_; }
  std::vector<double> & parameters() { return params_; }
  const std::vector<double> & parameters() const { return params_; }
  const std::vector<Block> & blocks() const { return blocks_; }
  const Block & block(const std::string & name) const;
  std::span<double> block_span(const std::string & name);

  Normalization & normalization() { return norm_; }
  const Normalization & normalization() const { return norm_; }

  /// Raw (unstandardized) feature sequence in, non-negative seconds out.
  /// Throws Errc::NonFiniteParameters.
  double forward(std::span<const Feature> raw_steps) const;
  double predict(const stream::SlidingWindow & window, const geometry::TargetLine & line) const;

  /// Mean absolute error over the batch and its gradient w.r.t. every parameter (same layout as
  /// parameters()). Subgradient 0 at prediction == label. Throws Errc::NonFiniteGradient.
  double loss_and_gradient(std::span<const FeatureSample> batch, std::vector<double> & gradient) const;

  double loss(std::span<const FeatureSample> batch) const;

  void check_finite() const;

private:
  double forward_standardized(std::span<const Feature> steps) const;

  int hidden_;
  std::vector<Block> blocks_;
  std::vector<double> params_;
  Normalization norm_;
};

double softplus(double x);
double sigmoid(double x);

}  // namespace ppet::predictors

#endif  // PPET__RECURRENT_HPP_
