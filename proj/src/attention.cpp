// Copyright 2026 The layoutjoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "layoutjoint/attention.hpp"

#include <algorithm>
#include <cmath>

#include "layoutjoint/error.hpp"

namespace layoutjoint {
namespace {

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : state_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  double uniform() {
    state_ = mix_seed(state_);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// n x n orthogonal matrix from Gram-Schmidt on Gaussian rows.
std::vector<double> random_orthogonal(std::size_t n, std::uint64_t seed) {
  NormalStream normal(seed);
  std::vector<double> m(n * n);
  for (;;) {
    for (double& v : m) v = normal.next();
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      double* ri = m.data() + i * n;
      for (std::size_t j = 0; j < i; ++j) {
        const double* rj = m.data() + j * n;
        double dot = 0.0;
        for (std::size_t k = 0; k < n; ++k) dot += ri[k] * rj[k];
        for (std::size_t k = 0; k < n; ++k) ri[k] -= dot * rj[k];
      }
      double norm = 0.0;
      for (std::size_t k = 0; k < n; ++k) norm += ri[k] * ri[k];
      norm = std::sqrt(norm);
      if (norm < 1e-8) {
        ok = false;
        break;
      }
      for (std::size_t k = 0; k < n; ++k) ri[k] /= norm;
    }
    if (ok) return m;
  }
}

std::vector<double> value_projection(std::size_t dim, std::size_t attribute_dims, double attribute_gain,
                                     std::uint64_t seed) {
  const std::size_t content = dim - attribute_dims;
  std::vector<double> w(dim * dim, 0.0);
  const std::vector<double> rot = random_orthogonal(content, seed);
  for (std::size_t i = 0; i < content; ++i) {
    for (std::size_t j = 0; j < content; ++j) w[i * dim + j] = rot[i * content + j];
  }
  for (std::size_t a = content; a < dim; ++a) w[a * dim + a] = attribute_gain;
  return w;
}

// rows x dim times dim x dim, rows of `block` in [begin, end) only.
void project_rows(const EmbeddingBlock& block, const std::vector<double>& w, std::size_t begin, std::size_t end,
                  std::vector<double>& out) {
  const std::size_t d = block.dim;
  for (std::size_t r = begin; r < end; ++r) {
    const double* x = block.values.data() + r * d;
    double* y = out.data() + r * d;
    std::fill(y, y + d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      const double* wi = w.data() + i * d;
      for (std::size_t j = 0; j < d; ++j) y[j] += xi * wi[j];
    }
  }
}

struct Projected {
  std::vector<double> q, k, v;
};

Projected project(const EmbeddingBlock& block, std::size_t text_len, const AttentionParams& params) {
  Projected p;
  const std::size_t n = block.rows * block.dim;
  p.q.resize(n);
  p.k.resize(n);
  p.v.resize(n);
  project_rows(block, params.text.query, 0, text_len, p.q);
  project_rows(block, params.text.key, 0, text_len, p.k);
  project_rows(block, params.text.value, 0, text_len, p.v);
  project_rows(block, params.image.query, text_len, block.rows, p.q);
  project_rows(block, params.image.key, text_len, block.rows, p.k);
  project_rows(block, params.image.value, text_len, block.rows, p.v);
  return p;
}

void check_inputs(const EmbeddingBlock& block, const JointAttentionMask& mask, const AttentionParams& params) {
  if (block.rows != mask.side()) throw Error(ErrorCode::kDimensionMismatch, "block rows differ from mask side");
  if (block.dim != params.dim) throw Error(ErrorCode::kDimensionMismatch, "block dim differs from attention dim");
  if (params.heads == 0 || params.dim % params.heads != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "heads must divide dim");
  }
  if (params.text.query.size() != params.dim * params.dim || params.image.query.size() != params.dim * params.dim) {
    throw Error(ErrorCode::kDimensionMismatch, "attention params are not initialized for this dim");
  }
}

// Normalized weights of `row` over `keys` for one head, written to `weights`.
void row_softmax(const Projected& p, std::size_t dim, std::size_t head_begin, std::size_t head_dim, double scale,
                 std::size_t row, const std::vector<std::size_t>& keys, std::vector<double>& weights) {
  const double* q = p.q.data() + row * dim + head_begin;
  weights.resize(keys.size());
  double max_score = -INFINITY;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const double* k = p.k.data() + keys[i] * dim + head_begin;
    double s = 0.0;
    for (std::size_t j = 0; j < head_dim; ++j) s += q[j] * k[j];
    s *= scale;
    weights[i] = s;
    max_score = std::max(max_score, s);
  }
  double sum = 0.0;
  for (double& w : weights) {
    w = std::exp(w - max_score);
    sum += w;
  }
  for (double& w : weights) w /= sum;
}

void permitted_keys(const JointAttentionMask& mask, std::size_t row, std::vector<std::size_t>& keys) {
  keys.clear();
  const auto cells = mask.row(row);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k]) keys.push_back(k);
  }
  if (keys.empty()) throw Error(ErrorCode::kEmptyRow, "row " + std::to_string(row) + " permits no key");
}

}  // namespace

AttentionParams AttentionParams::create(std::size_t dim, std::size_t attribute_dims, std::size_t heads,
                                        std::uint64_t seed) {
  if (dim == 0 || attribute_dims >= dim) {
    throw Error(ErrorCode::kInvalidArgument, "attribute_dims must be smaller than dim");
  }
  if (heads == 0 || dim % heads != 0) throw Error(ErrorCode::kInvalidArgument, "heads must divide dim");
  AttentionParams params;
  params.dim = dim;
  params.attribute_dims = attribute_dims;
  params.heads = heads;
  params.seed = seed;
  const std::uint64_t base = mix_seed(seed ^ 0x6a6f696e74ull);
  params.text.query = random_orthogonal(dim, mix_seed(base + 1));
  params.text.key = random_orthogonal(dim, mix_seed(base + 2));
  params.text.value = value_projection(dim, attribute_dims, 1.0, mix_seed(base + 3));
  params.image.query = random_orthogonal(dim, mix_seed(base + 4));
  params.image.key = random_orthogonal(dim, mix_seed(base + 5));
  params.image.value = value_projection(dim, attribute_dims, 0.0, mix_seed(base + 6));
  return params;
}

EmbeddingBlock masked_attention(const EmbeddingBlock& block, const JointAttentionMask& mask,
                                const AttentionParams& params) {
  check_inputs(block, mask, params);
  const std::size_t dim = block.dim;
  const std::size_t head_dim = params.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  const Projected p = project(block, mask.text_len(), params);

  EmbeddingBlock out(block.rows, dim, block.attribute_dims);
  std::vector<std::size_t> keys;
  std::vector<double> weights;
  for (std::size_t r = 0; r < block.rows; ++r) {
    if (mask.is_pad(r)) continue;
    permitted_keys(mask, r, keys);
    for (std::size_t h = 0; h < params.heads; ++h) {
      const std::size_t begin = h * head_dim;
      row_softmax(p, dim, begin, head_dim, scale, r, keys, weights);
      double* y = out.values.data() + r * dim + begin;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        const double* v = p.v.data() + keys[i] * dim + begin;
        const double w = weights[i];
        for (std::size_t j = 0; j < head_dim; ++j) y[j] += w * v[j];
      }
    }
  }
  return out;
}

std::vector<double> attention_weights(const EmbeddingBlock& block, const JointAttentionMask& mask,
                                      const AttentionParams& params, std::size_t head) {
  check_inputs(block, mask, params);
  if (head >= params.heads) throw Error(ErrorCode::kInvalidArgument, "head index out of range");
  const std::size_t side = block.rows;
  const std::size_t head_dim = params.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  const Projected p = project(block, mask.text_len(), params);

  std::vector<double> dense(side * side, 0.0);
  std::vector<std::size_t> keys;
  std::vector<double> weights;
  for (std::size_t r = 0; r < side; ++r) {
    if (mask.is_pad(r)) continue;
    permitted_keys(mask, r, keys);
    row_softmax(p, block.dim, head * head_dim, head_dim, scale, r, keys, weights);
    for (std::size_t i = 0; i < keys.size(); ++i) dense[r * side + keys[i]] = weights[i];
  }
  return dense;
}

EmbeddingBlock sampler_step(const SegmentMap& seg, const EmbeddingBlock& block, const PhaseSchedule& schedule,
                            int step, const MaskConfig& config, const AttentionParams& params) {
  const JointAttentionMask mask = build_mask(seg, schedule, step, config);
  EmbeddingBlock next = masked_attention(block, mask, params);
  for (std::size_t i = 0; i < next.values.size(); ++i) {
    next.values[i] = 0.5 * block.values[i] + 0.5 * next.values[i];
  }
  return next;
}

SamplerState run_sampler(const SegmentMap& seg, EmbeddingBlock initial, const PhaseSchedule& schedule,
                         const MaskConfig& config, const AttentionParams& params, bool keep_history) {
  if (initial.rows != seg.total()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding rows differ from the segment map length");
  }
  SamplerState state;
  state.block = std::move(initial);
  for (int t = 0; t < schedule.total_steps(); ++t) {
    state.block = sampler_step(seg, state.block, schedule, t, config, params);
    state.step = t + 1;
    if (keep_history) state.history.push_back(state.block);
  }
  return state;
}

std::vector<int> decode_attributes(const EmbeddingBlock& block, const SegmentMap& seg) {
  if (block.rows != seg.total()) {
    throw Error(ErrorCode::kDimensionMismatch, "embedding rows differ from the segment map length");
  }
  std::vector<int> labels(seg.image_len, kNoAttribute);
  const std::size_t first = block.content_dims();
  for (std::size_t i = 0; i < seg.image_len; ++i) {
    const auto row = block.row(seg.text_len + i);
    int best = kNoAttribute;
    double best_value = 0.0;
    bool shared = false;
    for (std::size_t a = 0; a < block.attribute_dims; ++a) {
      const double v = row[first + a];
      if (v > best_value) {
        best_value = v;
        best = static_cast<int>(a);
        shared = false;
      } else if (v == best_value && best != kNoAttribute) {
        shared = true;
      }
    }
    labels[i] = shared ? kNoAttribute : best;
  }
  return labels;
}

}  // namespace layoutjoint
