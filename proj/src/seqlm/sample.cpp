/* Copyright 2026 The TrajMem Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "trajmem/seqlm/sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace trajmem::seqlm {

void SampleConfig::validate() const {
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  if (!(temperature > 0)) {
    throw std::invalid_argument("temperature must be > 0");
  }
}

namespace {

// y[n, out] = x[n, in] W + b for a Linear stored as weight [in, out].
template <typename T>
std::vector<double> affine(const std::vector<double>& x, std::size_t n,
                           const nc::Linear<T>& layer) {
  const std::size_t in = layer.in_features(), out = layer.out_features();
  const auto w = layer.weight.data();
  const auto b = layer.bias.data();
  std::vector<double> y(n * out);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < out; ++c) y[r * out + c] = b[c];
    for (std::size_t k = 0; k < in; ++k) {
      const double xv = x[r * in + k];
      for (std::size_t c = 0; c < out; ++c) {
        y[r * out + c] += xv * static_cast<double>(w[k * out + c]);
      }
    }
  }
  return y;
}

template <typename T>
std::vector<double> layer_norm(const std::vector<double>& x, std::size_t n,
                               const nc::LayerNorm<T>& norm) {
  const std::size_t d = norm.gain.numel();
  const auto g = norm.gain.data();
  const auto b = norm.bias.data();
  std::vector<double> y(x.size());
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = x.data() + r * d;
    double mu = 0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + 1e-5);
    for (std::size_t j = 0; j < d; ++j) {
      y[r * d + j] = (row[j] - mu) * inv * g[j] + b[j];
    }
  }
  return y;
}

}  // namespace

template <typename T>
IncrementalDecoder<T>::IncrementalDecoder(const LMParams<T>& params)
    : params_(params),
      keys_(params.blocks.size()),
      values_(params.blocks.size()) {}

template <typename T>
std::vector<double> IncrementalDecoder<T>::prefill(
    std::span<const std::int32_t> prefix) {
  const LMConfig& c = params_.config;
  if (prefix.size() != c.observed) {
    throw nc::ContractError("prefill expects " + std::to_string(c.observed) +
                            " observed tokens, got " +
                            std::to_string(prefix.size()));
  }
  observed_ = prefix.size();
  length_ = 0;
  for (auto& k : keys_) k.clear();
  for (auto& v : values_) v.clear();
  mask_ = build_mask(c.mask, observed_, c.max_length() - observed_);
  return run(prefix);
}

template <typename T>
std::vector<double> IncrementalDecoder<T>::step(std::int32_t token) {
  if (observed_ == 0) throw nc::ContractError("step before prefill");
  if (length_ >= params_.config.max_length()) {
    throw nc::ContractError("sequence already at maximum length " +
                            std::to_string(length_));
  }
  return run(std::span<const std::int32_t>(&token, 1));
}

template <typename T>
std::vector<double> IncrementalDecoder<T>::run(
    std::span<const std::int32_t> tokens) {
  const LMConfig& c = params_.config;
  const std::size_t d = c.d_model, n = tokens.size();
  const std::size_t heads = c.heads, dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const std::size_t first = length_;

  std::vector<double> x(n * d);
  const auto emb = params_.token_embedding.data();
  const auto pos = params_.position.data();
  for (std::size_t r = 0; r < n; ++r) {
    const auto id = tokens[r];
    if (id < 0 || static_cast<std::size_t>(id) >= c.vocab) {
      throw nc::ContractError("token " + std::to_string(id) +
                              " outside vocabulary");
    }
    for (std::size_t j = 0; j < d; ++j) {
      x[r * d + j] = static_cast<double>(emb[id * d + j]) +
                     static_cast<double>(pos[(first + r) * d + j]);
    }
  }

  for (std::size_t l = 0; l < params_.blocks.size(); ++l) {
    const Block<T>& b = params_.blocks[l];
    const auto h = layer_norm(x, n, b.norm1);
    const auto q = affine(h, n, b.attention.query);
    const auto k = affine(h, n, b.attention.key);
    const auto v = affine(h, n, b.attention.value);
    keys_[l].insert(keys_[l].end(), k.begin(), k.end());
    values_[l].insert(values_[l].end(), v.begin(), v.end());
    const std::size_t cached = first + n;

    std::vector<double> ctx(n * d, 0.0);
    std::vector<double> score(cached);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t i = first + r;
      for (std::size_t hd = 0; hd < heads; ++hd) {
        double peak = -INFINITY;
        for (std::size_t j = 0; j < cached; ++j) {
          if (!mask_.allowed(i, j)) continue;
          double s = 0;
          for (std::size_t e = 0; e < dh; ++e) {
            s += q[r * d + hd * dh + e] * keys_[l][j * d + hd * dh + e];
          }
          score[j] = s * scale;
          peak = std::max(peak, score[j]);
        }
        double total = 0;
        for (std::size_t j = 0; j < cached; ++j) {
          if (!mask_.allowed(i, j)) continue;
          score[j] = std::exp(score[j] - peak);
          total += score[j];
        }
        for (std::size_t j = 0; j < cached; ++j) {
          if (!mask_.allowed(i, j)) continue;
          const double a = score[j] / total;
          for (std::size_t e = 0; e < dh; ++e) {
            ctx[r * d + hd * dh + e] += a * values_[l][j * d + hd * dh + e];
          }
        }
      }
    }
    const auto attended = affine(ctx, n, b.attention.output);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += attended[i];

    auto hidden = affine(layer_norm(x, n, b.norm2), n, b.ff_in);
    for (double& hv : hidden) hv = std::max(hv, 0.0);
    const auto ff = affine(hidden, n, b.ff_out);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += ff[i];
  }
  length_ += n;

  std::vector<double> last(x.end() - static_cast<std::ptrdiff_t>(d), x.end());
  return affine(layer_norm(last, 1, params_.final_norm), 1, params_.output);
}

std::int32_t sample_token(std::span<const double> logits, double temperature,
                          nc::Rng& rng) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> weights(logits.size());
  double total = 0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    weights[k] = std::exp((logits[k] - peak) / temperature);
    total += weights[k];
  }
  double u = rng.uniform() * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    u -= weights[k];
    if (u < 0) return static_cast<std::int32_t>(k);
  }
  // Rounding left u marginally non-negative: take the last positive weight.
  for (std::size_t k = weights.size(); k-- > 0;) {
    if (weights[k] > 0) return static_cast<std::int32_t>(k);
  }
  return 0;
}

template <typename T>
std::vector<std::int32_t> greedy_future(
    const LMParams<T>& params, std::span<const std::int32_t> observed,
    std::vector<std::vector<double>>* step_logits) {
  IncrementalDecoder<T> decoder(params);
  std::vector<double> logits = decoder.prefill(observed);
  std::vector<std::int32_t> out;
  if (step_logits != nullptr) step_logits->clear();
  for (std::size_t t = 0; t < params.config.future; ++t) {
    if (step_logits != nullptr) step_logits->push_back(logits);
    const auto best = static_cast<std::int32_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
    out.push_back(best);
    if (t + 1 < params.config.future) logits = decoder.step(best);
  }
  return out;
}

template <typename T>
std::vector<std::vector<std::int32_t>> sample_future(
    const LMParams<T>& params, std::span<const std::int32_t> observed,
    const SampleConfig& config) {
  config.validate();
  const nc::Rng root(config.seed);
  std::vector<std::vector<std::int32_t>> out(config.samples);
  // The prefix state is shared; each sample continues from a copy.
  IncrementalDecoder<T> prefix(params);
  const std::vector<double> first = prefix.prefill(observed);
  for (std::size_t s = 0; s < config.samples; ++s) {
    nc::Rng rng = root.fork(s);
    IncrementalDecoder<T> decoder = prefix;
    std::vector<double> logits = first;
    for (std::size_t t = 0; t < params.config.future; ++t) {
      const std::int32_t token = sample_token(logits, config.temperature, rng);
      out[s].push_back(token);
      if (t + 1 < params.config.future) logits = decoder.step(token);
    }
  }
  return out;
}

template class IncrementalDecoder<float>;
template class IncrementalDecoder<double>;
template std::vector<std::int32_t> greedy_future<float>(
    const LMParams<float>&, std::span<const std::int32_t>,
    std::vector<std::vector<double>>*);
template std::vector<std::int32_t> greedy_future<double>(
    const LMParams<double>&, std::span<const std::int32_t>,
    std::vector<std::vector<double>>*);
template std::vector<std::vector<std::int32_t>> sample_future<float>(
    const LMParams<float>&, std::span<const std::int32_t>,
    const SampleConfig&);
template std::vector<std::vector<std::int32_t>> sample_future<double>(
    const LMParams<double>&, std::span<const std::int32_t>,
    const SampleConfig&);

}  // namespace trajmem::seqlm
