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

#include "ppet/recurrent.hpp"

#include "ppet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ppet::predictors
{

double softplus(double x)
{
  // log(1 + e^x) without overflow
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x)
{
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<Feature> line_frame_features(
  const stream::SlidingWindow & window, const geometry::TargetLine & line)
{
  std::vector<Feature> out;
  if (window.size() < 2) {
    return out;
  }
  const auto n = line.normal;
  out.reserve(window.size() - 1);
  for (std::size_t k = 1; k < window.size(); ++k) {
    const auto & prev = window.points[k - 1];
    const auto & cur = window.points[k];
    const double dt = cur.t - prev.t;
    const auto step = cur.position - prev.position;
    const double inv_dt = dt > 0 ? 1.0 / dt : 0.0;
    out.push_back(
      {geometry::signed_distance_to_line(cur.position, line), geometry::dot(step, n) * inv_dt,
       geometry::cross(n, step) * inv_dt});
  }
  return out;
}

Normalization Normalization::fit(std::span<const FeatureSample> samples)
{
  Normalization norm;
  std::array<double, 3> sum{0, 0, 0};
  std::array<double, 3> sum2{0, 0, 0};
  double count = 0;
  for (const auto & s : samples) {
    for (const auto & f : s.steps) {
      for (int i = 0; i < 3; ++i) {
        sum[i] += f[i];
        sum2[i] += f[i] * f[i];
      }
      count += 1;
    }
  }
  if (count == 0) {
    return norm;
  }
  for (int i = 0; i < 3; ++i) {
    norm.mean[i] = sum[i] / count;
    const double var = std::max(0.0, sum2[i] / count - norm.mean[i] * norm.mean[i]);
    norm.scale[i] = var > 1e-12 ? std::sqrt(var) : 1.0;
  }
  return norm;
}

Feature Normalization::apply(const Feature & f) const
{
  return {(f[0] - mean[0]) / scale[0], (f[1] - mean[1]) / scale[1], (f[2] - mean[2]) / scale[2]};
}

RecurrentRegressor::RecurrentRegressor(int hidden_size) : hidden_(hidden_size)
{
  if (hidden_size <= 0) {
    fail(Errc::InvalidArgument, "hidden size must be positive");
  }
  const int h = hidden_size;
  const int in = kInputSize;
  std::size_t offset = 0;
  auto add = [&](const char * name, int rows, int cols) {
    blocks_.push_back({name, rows, cols, offset});
    offset += static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  };
  for (const char * g : {"z", "r", "c"}) {
    add((std::string("W") + g).c_str(), h, in);
    add((std::string("U") + g).c_str(), h, h);
    add((std::string("b") + g).c_str(), h, 1);
  }
  add("w_out", 1, h);
  add("b_out", 1, 1);
  params_.assign(offset, 0.0);
}

RecurrentRegressor RecurrentRegressor::random(int hidden_size, std::uint64_t seed)
{
  RecurrentRegressor model(hidden_size);
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (const auto & b : model.blocks_) {
    if (b.name[0] == 'b') {
      continue;
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      model.params_[b.offset + i] = dist(rng);
    }
  }
  return model;
}

const RecurrentRegressor::Block & RecurrentRegressor::block(const std::string & name) const
{
  for (const auto & b : blocks_) {
    if (b.name == name) {
      return b;
    }
  }
  fail(Errc::InvalidArgument, "unknown parameter block " + name);
}

std::span<double> RecurrentRegressor::block_span(const std::string & name)
{
  const auto & b = block(name);
  return {params_.data() + b.offset, b.size()};
}

void RecurrentRegressor::check_finite() const
{
  for (double p : params_) {
    if (!std::isfinite(p)) {
      fail(Errc::NonFiniteParameters, "model has non-finite parameters");
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(norm_.mean[i]) || !std::isfinite(norm_.scale[i]) || norm_.scale[i] == 0.0) {
      fail(Errc::NonFiniteParameters, "model has invalid normalization constants");
    }
  }
}

namespace
{

// Fixed block order from the constructor.
struct View
{
  const double * Wz;
  const double * Uz;
  const double * bz;
  const double * Wr;
  const double * Ur;
  const double * br;
  const double * Wc;
  const double * Uc;
  const double * bc;
  const double * wo;
  const double * bo;
};

template <typename T>
View make_view(const std::vector<RecurrentRegressor::Block> & blocks, T * base)
{
  return {base + blocks[0].offset, base + blocks[1].offset, base + blocks[2].offset,
          base + blocks[3].offset, base + blocks[4].offset, base + blocks[5].offset,
          base + blocks[6].offset, base + blocks[7].offset, base + blocks[8].offset,
          base + blocks[9].offset, base + blocks[10].offset};
}

struct StepCache
{
  std::vector<double> z, r, c, h_prev;
};

// Runs the cell over the standardized sequence; fills caches when requested.
double run_cell(
  const View & p, int H, std::span<const Feature> xs, std::vector<double> & h,
  std::vector<StepCache> * caches)
{
  constexpr int I = RecurrentRegressor::kInputSize;
  h.assign(static_cast<std::size_t>(H), 0.0);
  std::vector<double> z(H), r(H), rh(H), c(H);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const auto & x = xs[t];
    for (int i = 0; i < H; ++i) {
      double az = p.bz[i];
      double ar = p.br[i];
      for (int k = 0; k < I; ++k) {
        az += p.Wz[i * I + k] * x[k];
        ar += p.Wr[i * I + k] * x[k];
      }
      const double * uz = p.Uz + i * H;
      const double * ur = p.Ur + i * H;
      for (int k = 0; k < H; ++k) {
        az += uz[k] * h[k];
        ar += ur[k] * h[k];
      }
      z[i] = sigmoid(az);
      r[i] = sigmoid(ar);
    }
    for (int k = 0; k < H; ++k) {
      rh[k] = r[k] * h[k];
    }
    for (int i = 0; i < H; ++i) {
      double ac = p.bc[i];
      for (int k = 0; k < I; ++k) {
        ac += p.Wc[i * I + k] * x[k];
      }
      const double * uc = p.Uc + i * H;
      for (int k = 0; k < H; ++k) {
        ac += uc[k] * rh[k];
      }
      c[i] = std::tanh(ac);
    }
    if (caches) {
      caches->push_back({z, r, c, h});
    }
    for (int i = 0; i < H; ++i) {
      h[i] = (1.0 - z[i]) * h[i] + z[i] * c[i];
    }
  }
  double out = p.bo[0];
  for (int i = 0; i < H; ++i) {
    out += p.wo[i] * h[i];
  }
  return out;
}

}  // namespace

double RecurrentRegressor::forward_standardized(std::span<const Feature> steps) const
{
  const View p = make_view(blocks_, params_.data());
  std::vector<double> h;
  return softplus(run_cell(p, hidden_, steps, h, nullptr));
}

double RecurrentRegressor::forward(std::span<const Feature> raw_steps) const
{
  check_finite();
  std::vector<Feature> xs;
  xs.reserve(raw_steps.size());
  for (const auto & f : raw_steps) {
    xs.push_back(norm_.apply(f));
  }
  return forward_standardized(xs);
}

double RecurrentRegressor::predict(
  const stream::SlidingWindow & window, const geometry::TargetLine & line) const
{
  const auto feats = line_frame_features(window, line);
  return forward(feats);
}

double RecurrentRegressor::loss(std::span<const FeatureSample> batch) const
{
  if (batch.empty()) {
    return 0.0;
  }
  double total = 0.0;
  std::vector<Feature> xs;
  for (const auto & s : batch) {
    xs.clear();
    for (const auto & f : s.steps) {
      xs.push_back(norm_.apply(f));
    }
    total += std::abs(forward_standardized(xs) - s.label);
  }
  return total / static_cast<double>(batch.size());
}

double RecurrentRegressor::loss_and_gradient(
  std::span<const FeatureSample> batch, std::vector<double> & gradient) const
{
  constexpr int I = kInputSize;
  const int H = hidden_;
  gradient.assign(params_.size(), 0.0);
  if (batch.empty()) {
    return 0.0;
  }
  const View p = make_view(blocks_, params_.data());
  double * g = gradient.data();
  double * gWz = g + blocks_[0].offset;
  double * gUz = g + blocks_[1].offset;
  double * gbz = g + blocks_[2].offset;
  double * gWr = g + blocks_[3].offset;
  double * gUr = g + blocks_[4].offset;
  double * gbr = g + blocks_[5].offset;
  double * gWc = g + blocks_[6].offset;
  double * gUc = g + blocks_[7].offset;
  double * gbc = g + blocks_[8].offset;
  double * gwo = g + blocks_[9].offset;
  double * gbo = g + blocks_[10].offset;

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  std::vector<Feature> xs;
  std::vector<StepCache> caches;
  std::vector<double> h;
  std::vector<double> dh(H), dh_prev(H), dc_pre(H), drh(H), dz_pre(H), dr_pre(H);

  for (const auto & sample : batch) {
    xs.clear();
    for (const auto & f : sample.steps) {
      xs.push_back(norm_.apply(f));
    }
    caches.clear();
    caches.reserve(xs.size());
    const double out = run_cell(p, H, xs, h, &caches);
    const double y = softplus(out);
    const double err = y - sample.label;
    total += std::abs(err);
    const double sign = err > 0 ? 1.0 : (err < 0 ? -1.0 : 0.0);
    if (sign == 0.0) {
      continue;
    }
    const double dout = sign * inv_n * sigmoid(out);
    gbo[0] += dout;
    for (int i = 0; i < H; ++i) {
      gwo[i] += dout * h[i];
      dh[i] = dout * p.wo[i];
    }
    for (std::size_t t = xs.size(); t-- > 0;) {
      const auto & cache = caches[t];
      const auto & x = xs[t];
      const auto & hp = cache.h_prev;
      for (int i = 0; i < H; ++i) {
        const double z = cache.z[i];
        const double c = cache.c[i];
        dh_prev[i] = dh[i] * (1.0 - z);
        dz_pre[i] = dh[i] * (c - hp[i]) * z * (1.0 - z);
        dc_pre[i] = dh[i] * z * (1.0 - c * c);
      }
      // candidate path
      std::fill(drh.begin(), drh.end(), 0.0);
      for (int i = 0; i < H; ++i) {
        const double d = dc_pre[i];
        gbc[i] += d;
        for (int k = 0; k < I; ++k) {
          gWc[i * I + k] += d * x[k];
        }
        const double * uc = p.Uc + i * H;
        double * guc = gUc + i * H;
        for (int k = 0; k < H; ++k) {
          guc[k] += d * cache.r[k] * hp[k];
          drh[k] += uc[k] * d;
        }
      }
      for (int k = 0; k < H; ++k) {
        const double r = cache.r[k];
        dh_prev[k] += drh[k] * r;
        dr_pre[k] = drh[k] * hp[k] * r * (1.0 - r);
      }
      // gates
      for (int i = 0; i < H; ++i) {
        const double dz = dz_pre[i];
        const double dr = dr_pre[i];
        gbz[i] += dz;
        gbr[i] += dr;
        for (int k = 0; k < I; ++k) {
          gWz[i * I + k] += dz * x[k];
          gWr[i * I + k] += dr * x[k];
        }
        const double * uz = p.Uz + i * H;
        const double * ur = p.Ur + i * H;
        double * guz = gUz + i * H;
        double * gur = gUr + i * H;
        for (int k = 0; k < H; ++k) {
          guz[k] += dz * hp[k];
          gur[k] += dr * hp[k];
          dh_prev[k] += uz[k] * dz + ur[k] * dr;
        }
      }
      dh.swap(dh_prev);
    }
  }
  for (double v : gradient) {
    if (!std::isfinite(v)) {
      fail(Errc::NonFiniteGradient, "gradient has non-finite entries");
    }
  }
  return total * inv_n;
}

}  // namespace ppet::predictors
