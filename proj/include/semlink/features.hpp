// SPDX-License-Identifier: Apache-2.0
//
// Semantic feature tensors, importance-map sparsification, two-agent
// attention fusion and the training losses.

#ifndef SEMLINK_FEATURES_HPP
#define SEMLINK_FEATURES_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace semlink {

/// Real C x H x W tensor, row-major in (channel, row, column).
class FeatureTensor {
 public:
  FeatureTensor() = default;
  /// Zero tensor.
  FeatureTensor(std::size_t channels, std::size_t height, std::size_t width);
  /// Throws InvalidArgument on a size mismatch, zero dimension or
  /// non-finite value.
  FeatureTensor(std::size_t channels, std::size_t height, std::size_t width,
                std::vector<double> values);

  std::size_t channels() const noexcept { return c_; }
  std::size_t height() const noexcept { return h_; }
  std::size_t width() const noexcept { return w_; }
  std::size_t cells() const noexcept { return h_ * w_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(std::size_t c, std::size_t row, std::size_t col) const {
    return values_[(c * h_ + row) * w_ + col];
  }
  double& at(std::size_t c, std::size_t row, std::size_t col) {
    return values_[(c * h_ + row) * w_ + col];
  }

  const std::vector<double>& values() const noexcept { return values_; }

  bool same_shape(const FeatureTensor& o) const noexcept {
    return c_ == o.c_ && h_ == o.h_ && w_ == o.w_;
  }

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;

 private:
  std::size_t c_ = 0;
  std::size_t h_ = 0;
  std::size_t w_ = 0;
  std::vector<double> values_;
};

/// Per-cell weights in [0, 1] over the H x W plane.
struct ImportanceMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> weights;

  /// Row-major indices of the nonzero cells.
  std::vector<std::size_t> support() const;
  std::size_t nonzero_count() const;
};

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Masked tensor packed to its retained cells. `packed` holds, for each
/// mask cell in row-major order, its C channel values contiguously.
/// The mask itself travels as error-free side information.
struct SparseFeature {
  std::vector<Cell> mask_indices;
  std::vector<double> packed;
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  double compression_rate = 0.0;

  /// Throws InvalidArgument if any invariant is broken.
  void validate() const;
};

/// Scores each of the H*W cells; larger means more important.
using ImportanceScorer = std::function<std::vector<double>(const FeatureTensor&)>;

/// Per-cell L2 norm across channels.
std::vector<double> l2_cell_scores(const FeatureTensor& f);

/// Number of retained cells for a compression rate over `cells` cells.
std::size_t retained_cells(double cr, std::size_t cells);

/// Binary map with exactly round(cr*H*W) ones at the top-scoring cells.
/// Ties go to the smaller row-major index.
ImportanceMap generate_importance_map(const FeatureTensor& f, double cr,
                                      const ImportanceScorer& scorer = l2_cell_scores);

FeatureTensor apply_mask(const FeatureTensor& f, const ImportanceMap& map);

/// Throws ConsistencyError when `masked` is nonzero outside the map's support.
SparseFeature pack(const FeatureTensor& masked, const ImportanceMap& map);

FeatureTensor unpack(const SparseFeature& sparse);

/// Two-token scaled dot-product self-attention per spatial cell, with the
/// ego vector as the query. No learned projections.
FeatureTensor fuse_self_attention(const FeatureTensor& received,
                                  const FeatureTensor& ego);

/// Mean over pairs of the squared Euclidean distance.
double reconstruction_loss(std::span<const FeatureTensor> sent,
                           std::span<const FeatureTensor> received);

// ---------------------------------------------------------------- losses

inline constexpr double kSmoothL1Beta = 1.0;
inline constexpr double kFocalGamma = 2.0;
inline constexpr double kFocalAlpha = 0.25;

double smooth_l1(double residual, double beta = kSmoothL1Beta);

/// Binary focal loss for predicted object probability `p`.
double focal_loss(double p, bool positive, double alpha = kFocalAlpha,
                  double gamma = kFocalGamma);

/// Box regression (x, y, z, w, l, h, theta) and objectness for one anchor.
struct AnchorPrediction {
  std::array<double, 7> regression{};
  double score = 0.0;
};

struct AnchorTarget {
  std::array<double, 7> regression{};
  bool positive = false;
};

/// Per sample: mean over anchors of focal(score) plus, for positive
/// anchors, the smooth-L1 sum over the seven regression residuals.
/// The result is averaged over samples.
double perception_loss(std::span<const std::vector<AnchorPrediction>> preds,
                       std::span<const std::vector<AnchorTarget>> targets);

struct LossWeights {
  double lambda_rec = 1.0;
  double lambda_per = 1.0;
};

double total_loss(double l_rec, double l_per, const LossWeights& w);

}  // namespace semlink

#endif  // SEMLINK_FEATURES_HPP
