#include <cmath>
#include <numbers>

#include "specpart/errors.hpp"
#include "specpart/partition.hpp"

namespace specpart {

namespace {
double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = bump(t), b = bump(1.0 - t);
  return a / (a + b);
}

ImsResult ims_decompose(const DiscreteForm& form, const Field& u, double n, Point center) {
  if (!(n >= 1.0)) throw ValidationError("cutoff scale n must be at least 1");
  const GridSpec& g = form.grid();
  const Point lo = g.origin(), hi = g.upper();
  const int axes = g.dim();
  for (int a = 0; a < axes; ++a) {
    if (center[a] - 2 * n < lo[a] || center[a] + 2 * n > hi[a]) {
      throw WindowTooSmall("window does not contain B_2n around the centre");
    }
  }
  std::vector<double> in(g.size(), 0.0), out(g.size(), 0.0);
  const auto vals = u.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (vals[i] == 0.0) continue;
    const Point x = g.coords(i);
    const double r = std::hypot(x[0] - center[0], x[1] - center[1]);
    const double theta = 0.5 * std::numbers::pi * smooth_step(r / n - 1.0);
    in[i] = vals[i] * std::cos(theta);
    out[i] = vals[i] * std::sin(theta);
  }
  ImsResult res;
  res.inner = Field(u.mask(), std::move(in));
  res.outer = Field(u.mask(), std::move(out));
  res.residual = std::abs(form.energy(u) - form.energy(res.inner) - form.energy(res.outer));
  const double norm = u.norm();
  res.bound = kImsConstant * norm * norm / (n * n) + 10.0 * g.h();
  return res;
}

}  // namespace specpart
