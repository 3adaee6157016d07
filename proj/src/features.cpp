// SPDX-License-Identifier: Apache-2.0

#include "semlink/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "semlink/errors.hpp"

namespace semlink {

FeatureTensor::FeatureTensor(std::size_t channels, std::size_t height, std::size_t width)
    : FeatureTensor(channels, height, width,
                    std::vector<double>(channels * height * width, 0.0)) {}

FeatureTensor::FeatureTensor(std::size_t channels, std::size_t height, std::size_t width,
                             std::vector<double> values)
    : c_(channels), h_(height), w_(width), values_(std::move(values)) {
  if (c_ == 0 || h_ == 0 || w_ == 0) {
    throw InvalidArgument("FeatureTensor: dimensions must be positive");
  }
  if (values_.size() != c_ * h_ * w_) {
    throw InvalidArgument("FeatureTensor: expected " + std::to_string(c_ * h_ * w_) +
                          " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("FeatureTensor: non-finite value");
  }
}

std::vector<std::size_t> ImportanceMap::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] != 0.0) out.push_back(i);
  }
  return out;
}

std::size_t ImportanceMap::nonzero_count() const {
  return static_cast<std::size_t>(
      std::count_if(weights.begin(), weights.end(), [](double w) { return w != 0.0; }));
}

void SparseFeature::validate() const {
  if (channels == 0 || height == 0 || width == 0) {
    throw InvalidArgument("SparseFeature: dimensions must be positive");
  }
  for (std::size_t i = 0; i < mask_indices.size(); ++i) {
    const Cell& c = mask_indices[i];
    if (c.row >= height || c.col >= width) {
      throw InvalidArgument("SparseFeature: mask cell out of range");
    }
    if (i > 0 && !(mask_indices[i - 1] < c)) {
      throw InvalidArgument("SparseFeature: mask indices must be strictly increasing");
    }
  }
  if (packed.size() != mask_indices.size() * channels) {
    throw InvalidArgument("SparseFeature: packed length must equal K*C");
  }
  const double cells = static_cast<double>(height * width);
  const double expected = static_cast<double>(mask_indices.size()) / cells;
  if (std::abs(compression_rate - expected) > 1.0 / cells) {
    throw InvalidArgument("SparseFeature: compression rate inconsistent with mask size");
  }
}

std::vector<double> l2_cell_scores(const FeatureTensor& f) {
  std::vector<double> scores(f.cells(), 0.0);
  const auto& v = f.values();
  for (std::size_t c = 0; c < f.channels(); ++c) {
    const std::size_t base = c * f.cells();
    for (std::size_t i = 0; i < f.cells(); ++i) scores[i] += v[base + i] * v[base + i];
  }
  for (double& s : scores) s = std::sqrt(s);
  return scores;
}

std::size_t retained_cells(double cr, std::size_t cells) {
  if (!(cr > 0.0 && cr <= 1.0)) {
    throw InvalidArgument("compression rate must lie in (0, 1]");
  }
  return static_cast<std::size_t>(std::llround(cr * static_cast<double>(cells)));
}

ImportanceMap generate_importance_map(const FeatureTensor& f, double cr,
                                      const ImportanceScorer& scorer) {
  const std::size_t cells = f.cells();
  const std::size_t k = retained_cells(cr, cells);
  if (k == 0) throw InvalidArgument("compression rate rounds to an empty mask");

  const std::vector<double> scores = scorer(f);
  if (scores.size() != cells) throw InvalidArgument("scorer returned wrong length");

  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });

  ImportanceMap map{f.height(), f.width(), std::vector<double>(cells, 0.0)};
  for (std::size_t i = 0; i < k; ++i) map.weights[order[i]] = 1.0;
  return map;
}

namespace {

void check_map_shape(const FeatureTensor& f, const ImportanceMap& map) {
  if (map.height != f.height() || map.width != f.width() ||
      map.weights.size() != f.cells()) {
    throw InvalidArgument("importance map shape does not match tensor");
  }
}

}  // namespace

FeatureTensor apply_mask(const FeatureTensor& f, const ImportanceMap& map) {
  check_map_shape(f, map);
  std::vector<double> out(f.values());
  const std::size_t cells = f.cells();
  for (std::size_t c = 0; c < f.channels(); ++c) {
    for (std::size_t i = 0; i < cells; ++i) out[c * cells + i] *= map.weights[i];
  }
  return FeatureTensor(f.channels(), f.height(), f.width(), std::move(out));
}

SparseFeature pack(const FeatureTensor& masked, const ImportanceMap& map) {
  check_map_shape(masked, map);
  const std::size_t cells = masked.cells();
  const std::size_t ch = masked.channels();
  const auto& v = masked.values();

  SparseFeature out;
  out.channels = ch;
  out.height = masked.height();
  out.width = masked.width();

  for (std::size_t i = 0; i < cells; ++i) {
    if (map.weights[i] != 0.0) {
      out.mask_indices.push_back({i / masked.width(), i % masked.width()});
      for (std::size_t c = 0; c < ch; ++c) out.packed.push_back(v[c * cells + i]);
    } else {
      for (std::size_t c = 0; c < ch; ++c) {
        if (v[c * cells + i] != 0.0) {
          throw ConsistencyError("pack: nonzero value outside the mask support");
        }
      }
    }
  }
  out.compression_rate =
      static_cast<double>(out.mask_indices.size()) / static_cast<double>(cells);
  return out;
}

FeatureTensor unpack(const SparseFeature& sparse) {
  sparse.validate();
  FeatureTensor out(sparse.channels, sparse.height, sparse.width);
  for (std::size_t k = 0; k < sparse.mask_indices.size(); ++k) {
    const Cell& cell = sparse.mask_indices[k];
    for (std::size_t c = 0; c < sparse.channels; ++c) {
      out.at(c, cell.row, cell.col) = sparse.packed[k * sparse.channels + c];
    }
  }
  return out;
}

FeatureTensor fuse_self_attention(const FeatureTensor& received, const FeatureTensor& ego) {
  if (!received.same_shape(ego)) {
    throw InvalidArgument("fuse_self_attention: shape mismatch");
  }
  const std::size_t ch = ego.channels();
  const std::size_t cells = ego.cells();
  const double scale = 1.0 / std::sqrt(static_cast<double>(ch));
  const auto& r = received.values();
  const auto& f = ego.values();
  std::vector<double> out(f.size());

  for (std::size_t i = 0; i < cells; ++i) {
    double s_fr = 0.0;
    double s_ff = 0.0;
    for (std::size_t c = 0; c < ch; ++c) {
      s_fr += f[c * cells + i] * r[c * cells + i];
      s_ff += f[c * cells + i] * f[c * cells + i];
    }
    s_fr *= scale;
    s_ff *= scale;
    // softmax over the two keys, shifted for stability
    const double m = std::max(s_fr, s_ff);
    const double e_r = std::exp(s_fr - m);
    const double e_f = std::exp(s_ff - m);
    const double w_r = e_r / (e_r + e_f);
    const double w_f = 1.0 - w_r;
    for (std::size_t c = 0; c < ch; ++c) {
      out[c * cells + i] = w_r * r[c * cells + i] + w_f * f[c * cells + i];
    }
  }
  return FeatureTensor(ch, ego.height(), ego.width(), std::move(out));
}

double reconstruction_loss(std::span<const FeatureTensor> sent,
                           std::span<const FeatureTensor> received) {
  if (sent.empty()) throw InvalidArgument("reconstruction_loss: empty batch");
  if (sent.size() != received.size()) {
    throw InvalidArgument("reconstruction_loss: batch sizes differ");
  }
  double total = 0.0;
  for (std::size_t n = 0; n < sent.size(); ++n) {
    if (!sent[n].same_shape(received[n])) {
      throw InvalidArgument("reconstruction_loss: tensor shapes differ");
    }
    const auto& a = sent[n].values();
    const auto& b = received[n].values();
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i]) * (a[i] - b[i]);
    total += sq;
  }
  return total / static_cast<double>(sent.size());
}

double smooth_l1(double residual, double beta) {
  const double a = std::abs(residual);
  return a < beta ? 0.5 * a * a / beta : a - 0.5 * beta;
}

double focal_loss(double p, bool positive, double alpha, double gamma) {
  constexpr double kTiny = 1e-300;
  if (positive) {
    return -alpha * std::pow(1.0 - p, gamma) * std::log(std::max(p, kTiny));
  }
  return -(1.0 - alpha) * std::pow(p, gamma) * std::log(std::max(1.0 - p, kTiny));
}

double perception_loss(std::span<const std::vector<AnchorPrediction>> preds,
                       std::span<const std::vector<AnchorTarget>> targets) {
  if (preds.size() != targets.size()) {
    throw InvalidArgument("perception_loss: sample counts differ");
  }
  if (preds.empty()) throw InvalidArgument("perception_loss: empty batch");
  double total = 0.0;
  for (std::size_t n = 0; n < preds.size(); ++n) {
    const auto& p = preds[n];
    const auto& t = targets[n];
    if (p.size() != t.size()) {
      throw InvalidArgument("perception_loss: anchor counts differ");
    }
    if (p.empty()) continue;
    double sample = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
      sample += focal_loss(p[a].score, t[a].positive);
      if (t[a].positive) {
        for (std::size_t j = 0; j < 7; ++j) {
          sample += smooth_l1(p[a].regression[j] - t[a].regression[j]);
        }
      }
    }
    total += sample / static_cast<double>(p.size());
  }
  return total / static_cast<double>(preds.size());
}

double total_loss(double l_rec, double l_per, const LossWeights& w) {
  if (!(std::isfinite(w.lambda_rec) && std::isfinite(w.lambda_per)) ||
      w.lambda_rec < 0.0 || w.lambda_per < 0.0) {
    throw InvalidArgument("loss weights must be finite and nonnegative");
  }
  return w.lambda_rec * l_rec + w.lambda_per * l_per;
}

}  // namespace semlink
