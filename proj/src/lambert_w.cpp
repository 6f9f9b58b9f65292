#include "uowsn/lambert_w.hpp"

#include <cmath>
#include <stdexcept>

namespace uowsn {

namespace {
constexpr double kTolerance = 1e-14;
constexpr int kMaxIterations = 50;
}  // namespace

double lambert_w0(double x) {
  if (!std::isfinite(x) || x < 0.0) {
    throw std::domain_error("lambert_w0: argument must be finite and >= 0");
  }
  if (x == 0.0) return 0.0;

  double w;
  if (x < 3.0) {
    w = std::log1p(x);
    if (x < 0.5) w = x * (1.0 - x);
  } else {
    const double lx = std::log(x);
    w = lx - std::log(lx);
  }

  for (int it = 0; it < kMaxIterations; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= kTolerance * (1.0 + std::abs(w))) break;
  }
  return w;
}

}  // namespace uowsn
