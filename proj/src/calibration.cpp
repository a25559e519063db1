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

#include "ppet/calibration.hpp"

#include "ppet/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

namespace ppet::calibration
{

void ConfusionCounts::add(bool predicted, bool actual)
{
  if (predicted && actual) {
    ++tp;
  } else if (predicted) {
    ++fp;
  } else if (actual) {
    ++fn;
  } else {
    ++tn;
  }
}

Metrics metrics(const ConfusionCounts & c)
{
  Metrics m;
  const auto ratio = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
    if (den == 0) {
      return std::nullopt;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  if (m.precision && m.recall && (*m.precision + *m.recall) > 0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

double require(const std::optional<double> & metric, const char * name)
{
  if (!metric) {
    fail(Errc::UndefinedMetric, std::string(name) + " has a zero denominator");
  }
  return *metric;
}

namespace
{

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed)
{
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng() % i)]);
  }
  return idx;
}

}  // namespace

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, int k, std::uint64_t seed)
{
  if (k < 2) {
    fail(Errc::InvalidArgument, "k-fold needs k >= 2");
  }
  const auto kk = static_cast<std::size_t>(k);
  if (n < kk) {
    fail(Errc::TooFewEpisodes, std::to_string(n) + " episodes for " + std::to_string(k) + " folds");
  }
  const auto idx = shuffled(n, seed);
  std::vector<std::vector<std::size_t>> folds(kk);
  const std::size_t base = n / kk;
  const std::size_t extra = n % kk;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < kk; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos), idx.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(folds[f].begin(), folds[f].end());
    pos += size;
  }
  return folds;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(
  std::size_t n, double test_fraction, std::uint64_t seed)
{
  const auto idx = shuffled(n, seed);
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  std::vector<std::size_t> test(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

std::vector<FrameValues> slot_frames(const risk::EpisodeTrace & episode, RiskArea slot)
{
  std::vector<FrameValues> out;
  out.reserve(episode.frames.size());
  for (const auto & v : episode.frames) {
    FrameValues f;
    const bool closer = slot == RiskArea::Closer || slot == RiskArea::Merged;
    const bool further = slot == RiskArea::Further || slot == RiskArea::Merged;
    if (closer && v.c_pf) {
      f.pf.push_back(*v.c_pf);
    }
    if (further && v.f_pf) {
      f.pf.push_back(*v.f_pf);
    }
    if (closer && v.c_vf) {
      f.vf.push_back(*v.c_vf);
    }
    if (further && v.f_vf) {
      f.vf.push_back(*v.f_vf);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<Unit> make_units(
  const std::vector<risk::EpisodeTrace> & episodes,
  const std::map<std::pair<std::string, RiskArea>, bool> & labels,
  const risk::RiskThresholdConfig & modes)
{
  std::vector<Unit> units;
  for (const auto & ep : episodes) {
    for (RiskArea slot : modes.slots(ep.category)) {
      auto it = labels.find({ep.ped_id, slot});
      if (it == labels.end()) {
        continue;
      }
      units.push_back({ep.ped_id, ep.category, slot, slot_frames(ep, slot), it->second});
    }
  }
  return units;
}

std::vector<risk::ScenarioRule> AxisSpec::rules() const
{
  if (!enabled) {
    return {risk::ScenarioRule{false, {0.0, 0.0}}};
  }
  if (!(step > 0)) {
    fail(Errc::InvalidArgument, "grid step must be positive");
  }
  // values snapped to 1e-9 so 0.1-steps print and compare cleanly
  const auto snap = [](double v) { return std::round(v * 1e9) / 1e9; };
  std::vector<double> alphas;
  std::vector<double> betas;
  for (int i = 0;; ++i) {
    const double a = snap(alpha_min + i * step);
    if (a > alpha_max + 1e-9) {
      break;
    }
    alphas.push_back(a);
  }
  for (int i = 0;; ++i) {
    const double b = snap(beta_min + i * step);
    if (b > beta_max + 1e-9) {
      break;
    }
    betas.push_back(b);
  }
  std::vector<risk::ScenarioRule> out;
  for (double a : alphas) {
    for (double b : betas) {
      if (a <= b) {
        out.push_back({true, {a, b}});
      }
    }
  }
  return out;
}

std::size_t GridSpec::size() const
{
  return pf.rules().size() * vf.rules().size() * counter_limits.size();
}

bool classify_unit(const Unit & unit, const risk::AreaThresholds & th)
{
  long hits = 0;
  for (const auto & f : unit.frames) {
    bool hit = false;
    if (th.pf) {
      for (double v : f.pf) {
        hit |= th.pf->matches(v);
      }
    }
    if (th.vf) {
      for (double v : f.vf) {
        hit |= th.vf->matches(v);
      }
    }
    hits += hit ? 1 : 0;
  }
  return hits > th.counter_limit;
}

namespace
{

struct Bitsets
{
  std::vector<std::size_t> offset;  // per unit, in words
  std::vector<std::size_t> words;   // per unit
  std::size_t total{0};
  std::vector<std::uint64_t> bits;  // rules x total

  const std::uint64_t * rule(std::size_t r) const { return bits.data() + r * total; }
};

Bitsets build_bitsets(
  const std::vector<const Unit *> & units, const std::vector<risk::ScenarioRule> & rules, bool pf_axis)
{
  Bitsets b;
  for (const auto * u : units) {
    b.offset.push_back(b.total);
    const std::size_t w = (u->frames.size() + 63) / 64;
    b.words.push_back(w);
    b.total += w;
  }
  b.bits.assign(rules.size() * b.total, 0);
  for (std::size_t r = 0; r < rules.size(); ++r) {
    if (!rules[r].enabled) {
      continue;
    }
    std::uint64_t * dst = b.bits.data() + r * b.total;
    for (std::size_t p = 0; p < units.size(); ++p) {
      const auto & frames = units[p]->frames;
      for (std::size_t f = 0; f < frames.size(); ++f) {
        const auto & values = pf_axis ? frames[f].pf : frames[f].vf;
        for (double v : values) {
          if (rules[r].matches(v)) {
            dst[b.offset[p] + f / 64] |= std::uint64_t{1} << (f % 64);
            break;
          }
        }
      }
    }
  }
  return b;
}

struct Best
{
  bool valid{false};
  double acc{0.0};
  double width{0.0};
  std::size_t index{0};
  std::size_t i{0}, j{0}, t{0};
};

bool better(const Best & a, const Best & b)
{
  if (!b.valid) {
    return a.valid;
  }
  if (!a.valid) {
    return false;
  }
  if (a.acc > b.acc + 1e-12) {
    return true;
  }
  if (a.acc < b.acc - 1e-12) {
    return false;
  }
  if (a.width < b.width - 1e-12) {
    return true;
  }
  if (a.width > b.width + 1e-12) {
    return false;
  }
  return a.index < b.index;
}

double rule_width(const risk::ScenarioRule & r) { return r.enabled ? r.interval.width() : 0.0; }

}  // namespace

CalibrationResult grid_search(const std::vector<Unit> & units, const GridSpec & grid, const SearchOptions & options)
{
  const auto pf_rules = grid.pf.rules();
  const auto vf_rules = grid.vf.rules();
  const auto & thetas = grid.counter_limits;
  if (pf_rules.empty() || vf_rules.empty() || thetas.empty()) {
    fail(Errc::EmptyGrid, "grid has no points");
  }
  for (int th : thetas) {
    if (th < 1) {
      fail(Errc::InvalidArgument, "counter limits must be >= 1");
    }
  }

  const auto [train_idx, test_idx] = holdout_split(units.size(), options.test_fraction, options.seed);
  const auto folds = kfold_split(train_idx.size(), options.k, options.seed ^ 0x5851f42d4c957f2dULL);
  std::vector<const Unit *> pool;
  for (auto i : train_idx) {
    pool.push_back(&units[i]);
  }
  std::vector<std::size_t> fold_of(pool.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (auto p : folds[f]) {
      fold_of[p] = f;
    }
  }

  const Bitsets pf_bits = build_bitsets(pool, pf_rules, true);
  const Bitsets vf_bits = build_bitsets(pool, vf_rules, false);

  const std::size_t nj = vf_rules.size();
  const std::size_t nt = thetas.size();
  const std::size_t nk = folds.size();
  const std::size_t total_points = pf_rules.size() * nj * nt;
  const bool record = options.record_scores && total_points <= kMaxRecordedScores;
  std::vector<double> score_values(record ? total_points : 0, 0.0);

  const auto search_range = [&](std::size_t i_begin, std::size_t i_end) {
    Best best;
    std::vector<std::int64_t> correct(nt * nk);
    for (std::size_t i = i_begin; i < i_end; ++i) {
      const std::uint64_t * a = pf_bits.rule(i);
      for (std::size_t j = 0; j < nj; ++j) {
        const std::uint64_t * b = vf_bits.rule(j);
        std::fill(correct.begin(), correct.end(), 0);
        for (std::size_t p = 0; p < pool.size(); ++p) {
          const std::size_t off = pf_bits.offset[p];
          int count = 0;
          for (std::size_t w = 0; w < pf_bits.words[p]; ++w) {
            count += std::popcount(a[off + w] | b[off + w]);
          }
          const bool label = pool[p]->risk2;
          std::int64_t * row = correct.data() + fold_of[p];
          for (std::size_t t = 0; t < nt; ++t) {
            row[t * nk] += ((count > thetas[t]) == label) ? 1 : 0;
          }
        }
        for (std::size_t t = 0; t < nt; ++t) {
          double acc = 0.0;
          for (std::size_t f = 0; f < nk; ++f) {
            acc += static_cast<double>(correct[t * nk + f]) / static_cast<double>(folds[f].size());
          }
          acc /= static_cast<double>(nk);
          const std::size_t index = (i * nj + j) * nt + t;
          if (record) {
            score_values[index] = acc;
          }
          Best cand{true, acc, rule_width(pf_rules[i]) + rule_width(vf_rules[j]), index, i, j, t};
          if (better(cand, best)) {
            best = cand;
          }
        }
      }
    }
    return best;
  };

  const std::size_t n_threads = std::clamp<std::size_t>(
    std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, pf_rules.size()));
  std::vector<Best> partial(n_threads);
  if (n_threads == 1) {
    partial[0] = search_range(0, pf_rules.size());
  } else {
    std::vector<std::thread> workers;
    const std::size_t chunk = (pf_rules.size() + n_threads - 1) / n_threads;
    for (std::size_t w = 0; w < n_threads; ++w) {
      const std::size_t lo = std::min(pf_rules.size(), w * chunk);
      const std::size_t hi = std::min(pf_rules.size(), lo + chunk);
      workers.emplace_back([&, w, lo, hi] { partial[w] = search_range(lo, hi); });
    }
    for (auto & t : workers) {
      t.join();
    }
  }
  Best best;
  for (const auto & p : partial) {
    if (better(p, best)) {
      best = p;
    }
  }

  CalibrationResult result;
  result.best = {pf_rules[best.i], vf_rules[best.j], thetas[best.t]};
  result.cv_accuracy = best.acc;
  result.train_units = pool.size();
  result.test_units = test_idx.size();
  for (auto i : test_idx) {
    result.test_counts.add(classify_unit(units[i], result.best), units[i].risk2);
  }
  result.test_metrics = metrics(result.test_counts);
  if (record) {
    result.scores.reserve(total_points);
    for (std::size_t i = 0; i < pf_rules.size(); ++i) {
      for (std::size_t j = 0; j < nj; ++j) {
        for (std::size_t t = 0; t < nt; ++t) {
          const std::size_t index = (i * nj + j) * nt + t;
          result.scores.push_back({{pf_rules[i], vf_rules[j], thetas[t]}, score_values[index]});
        }
      }
    }
  }
  return result;
}

}  // namespace ppet::calibration
