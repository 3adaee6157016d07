// SPDX-License-Identifier: Apache-2.0

#include "semlink/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace semlink {

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is.
fftw_plan plan_for(std::size_t n, int sign) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, Plan> plans;
  std::lock_guard lock(mu);
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second.get();
  CVec buf(n);
  auto* raw = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan p =
      fftw_plan_dft_1d(static_cast<int>(n), raw, raw, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(std::make_pair(n, sign), Plan(p));
  return p;
}

void run(std::span<cplx> data, int sign) {
  const std::size_t n = data.size();
  if (n == 0) return;
  fftw_plan p = plan_for(n, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, buf, buf);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& z : data) z *= scale;
}

}  // namespace

void fft_unitary(std::span<cplx> data) { run(data, FFTW_FORWARD); }
void ifft_unitary(std::span<cplx> data) { run(data, FFTW_BACKWARD); }

}  // namespace semlink
