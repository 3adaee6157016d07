// SPDX-License-Identifier: Apache-2.0

#include "semlink/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "semlink/errors.hpp"

namespace semlink {

double snr_db(double p, double sigma2) {
  if (!(p > 0.0) || !(sigma2 > 0.0)) throw InvalidArgument("snr_db: inputs must be positive");
  return 10.0 * std::log10(p / sigma2);
}

double ber(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits) {
  if (tx_bits.size() != rx_bits.size()) throw InvalidArgument("ber: length mismatch");
  if (tx_bits.empty()) throw InvalidArgument("ber: empty bit streams");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < tx_bits.size(); ++i) diff += (tx_bits[i] & 1U) != (rx_bits[i] & 1U);
  return static_cast<double>(diff) / static_cast<double>(tx_bits.size());
}

void DetectionBox::validate() const {
  for (double v : {x, y, z, w, l, h, theta, score}) {
    if (!std::isfinite(v)) throw InvalidArgument("DetectionBox: non-finite field");
  }
  if (!(w > 0.0 && l > 0.0 && h > 0.0)) throw InvalidArgument("DetectionBox: extents must be positive");
}

double normalize_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::remainder(theta, two_pi);  // [-pi, pi]
  if (t <= -std::numbers::pi) t += two_pi;
  return t;
}

namespace {

struct Pt {
  double x, y;
};

std::array<Pt, 4> corners(const DetectionBox& b) {
  const double c = std::cos(b.theta), s = std::sin(b.theta);
  const double dl = 0.5 * b.l, dw = 0.5 * b.w;
  // counter-clockwise
  const std::array<Pt, 4> local{{{dl, dw}, {-dl, dw}, {-dl, -dw}, {dl, -dw}}};
  std::array<Pt, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = {b.x + c * local[i].x - s * local[i].y, b.y + s * local[i].x + c * local[i].y};
  }
  return out;
}

double cross(Pt o, Pt a, Pt b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double polygon_area(const std::vector<Pt>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Pt& u = p[i];
    const Pt& v = p[(i + 1) % p.size()];
    a += u.x * v.y - v.x * u.y;
  }
  return 0.5 * std::abs(a);
}

// Sutherland-Hodgman clipping of `subject` by the convex ccw polygon `clip`.
std::vector<Pt> clip_polygon(std::vector<Pt> subject, const std::array<Pt, 4>& clip) {
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    const Pt a = clip[e];
    const Pt b = clip[(e + 1) % clip.size()];
    std::vector<Pt> out;
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Pt p = subject[i];
      const Pt q = subject[(i + 1) % subject.size()];
      const double dp = cross(a, b, p);
      const double dq = cross(a, b, q);
      if (dp >= 0.0) out.push_back(p);
      if ((dp >= 0.0) != (dq >= 0.0)) {
        const double t = dp / (dp - dq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    subject = std::move(out);
  }
  return subject;
}

}  // namespace

double iou_3d(const DetectionBox& a, const DetectionBox& b) {
  a.validate();
  b.validate();
  const double z_lo = std::max(a.z - 0.5 * a.h, b.z - 0.5 * b.h);
  const double z_hi = std::min(a.z + 0.5 * a.h, b.z + 0.5 * b.h);
  const double dz = z_hi - z_lo;
  if (dz <= 0.0) return 0.0;

  const auto ca = corners(a);
  const auto cb = corners(b);
  const std::vector<Pt> inter = clip_polygon({ca.begin(), ca.end()}, cb);
  if (inter.size() < 3) return 0.0;
  const double vi = polygon_area(inter) * dz;
  const double va = a.w * a.l * a.h;
  const double vb = b.w * b.l * b.h;
  const double u = va + vb - vi;
  return u > 0.0 ? std::clamp(vi / u, 0.0, 1.0) : 0.0;
}

double average_precision(std::span<const DetectionBox> preds, std::span<const DetectionBox> gts,
                         double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw InvalidArgument("average_precision: IoU threshold must lie in (0, 1)");
  }
  if (gts.empty()) return preds.empty() ? 1.0 : 0.0;
  if (preds.empty()) return 0.0;

  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return preds[i].score > preds[j].score; });

  std::vector<bool> taken(gts.size(), false);
  std::vector<double> precision, recall;
  std::size_t tp = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const DetectionBox& p = preds[order[rank]];
    double best = -1.0;
    std::size_t best_g = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double iou = iou_3d(p, gts[g]);
      if (iou >= iou_threshold && iou > best) {
        best = iou;
        best_g = g;
      }
    }
    if (best_g < gts.size()) {
      taken[best_g] = true;
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(rank + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(gts.size()));
  }

  // max-precision envelope, integrated over recall steps
  for (std::size_t i = precision.size() - 1; i-- > 0;) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }
  double ap = 0.0;
  double prev_r = 0.0;
  for (std::size_t i = 0; i < recall.size(); ++i) {
    ap += (recall[i] - prev_r) * precision[i];
    prev_r = recall[i];
  }
  return ap;
}

std::vector<DetectionBox> read_detections(std::istream& is, bool with_score) {
  std::vector<DetectionBox> out;
  std::string line;
  std::size_t lineno = 0;
  const std::size_t expected = with_score ? 8 : 7;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> f;
    double v;
    while (ss >> v) f.push_back(v);
    if (!ss.eof() || f.size() != expected) {
      throw IoError("detections line " + std::to_string(lineno) + ": expected " +
                    std::to_string(expected) + " numeric fields");
    }
    DetectionBox b{f[0], f[1], f[2], f[3], f[4], f[5], normalize_angle(f[6]),
                   with_score ? f[7] : 1.0};
    try {
      b.validate();
    } catch (const InvalidArgument& e) {
      throw IoError("detections line " + std::to_string(lineno) + ": " + e.what());
    }
    if (with_score && !(b.score >= 0.0 && b.score <= 1.0)) {
      throw IoError("detections line " + std::to_string(lineno) + ": score outside [0, 1]");
    }
    out.push_back(b);
  }
  return out;
}

}  // namespace semlink
