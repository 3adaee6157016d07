// SPDX-License-Identifier: Apache-2.0
//
// Communication and detection metrics.

#ifndef SEMLINK_METRICS_HPP
#define SEMLINK_METRICS_HPP

#include <cstdint>
#include <istream>
#include <span>
#include <vector>

#include "semlink/features.hpp"

namespace semlink {

/// 10 log10(p / sigma2).
double snr_db(double p, double sigma2);

/// Fraction of differing positions.
double ber(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits);

inline double reconstruction_mse(std::span<const FeatureTensor> sent,
                                 std::span<const FeatureTensor> received) {
  return reconstruction_loss(sent, received);
}

/// Oriented 3D box: center (x, y, z), extents w (across heading), l
/// (along heading), h (vertical), yaw theta about z.
struct DetectionBox {
  double x = 0.0, y = 0.0, z = 0.0;
  double w = 1.0, l = 1.0, h = 1.0;
  double theta = 0.0;
  double score = 1.0;

  /// Throws InvalidArgument on non-positive extents or non-finite fields.
  void validate() const;
};

/// Wraps an angle into (-pi, pi].
double normalize_angle(double theta);

/// Ground-plane rectangle intersection times vertical overlap, over the
/// union of volumes.
double iou_3d(const DetectionBox& a, const DetectionBox& b);

/// Score-ranked greedy matching (each prediction takes the unmatched
/// ground truth of highest IoU at or above the threshold) and the area
/// under the max-precision envelope of the PR curve. Empty ground truth
/// gives 1 if there are no predictions and 0 otherwise.
double average_precision(std::span<const DetectionBox> preds, std::span<const DetectionBox> gts,
                         double iou_threshold);

/// One box per line: x y z w l h theta [score]. Eight fields for
/// predictions, seven for ground truth. Blank lines and lines starting
/// with '#' are skipped; theta is wrapped into (-pi, pi].
std::vector<DetectionBox> read_detections(std::istream& is, bool with_score);

}  // namespace semlink

#endif  // SEMLINK_METRICS_HPP
