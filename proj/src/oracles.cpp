#include "specpart/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "specpart/errors.hpp"

namespace specpart::oracles {

namespace {
constexpr double pi = std::numbers::pi;

double f(double L, double c, double l) { return std::tan(std::sqrt(l) * L) + 1.0 / std::sqrt(c / l - 1.0); }
}  // namespace

double transcendental_residual(double L, double c, double lambda) { return f(L, c, lambda); }

double transcendental_root(double L, double c) {
  if (!(L > 0.0) || !(c > pi * pi / (4 * L * L)) || !(c < pi * pi / (L * L))) {
    throw BracketInvalid("need pi^2/(4L^2) < c < pi^2/L^2");
  }
  // f -> -inf at the left end, +inf as l -> c
  double lo = pi * pi / (4 * L * L), hi = std::min(c, pi * pi / (L * L));
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(L, c, mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

HalfStripSpectrum halfstrip_spectrum(const HalfStripSpec& spec, int count) {
  if (!(spec.ell > 0.0)) throw ValidationError("half-strip width must be positive");
  HalfStripSpectrum out;
  out.lambda0 = transcendental_root(spec.L, spec.c);
  const double w = 1.0 / (spec.ell * spec.ell);
  out.sigma = spec.c + w;
  for (int j = 1; j <= count; ++j) out.eigenvalues.push_back(out.lambda0 + j * j * w);
  for (int j = 1; out.lambda0 + j * j * w < out.sigma; ++j) out.m = j;
  return out;
}

double halfstrip_ell_for(int m, double L, double c) {
  if (m < 1) throw ValidationError("m must be at least 1");
  const double gap = c - transcendental_root(L, c);
  const double target = 0.5 * ((m * m - 1.0) + ((m + 1.0) * (m + 1.0) - 1.0));
  return std::sqrt(target / gap);
}

std::vector<double> rectangle_eigs(double a, double b, int count) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("rectangle sides must be positive");
  std::vector<double> all;
  for (int m = 1; m <= count; ++m) {
    for (int n = 1; n <= count; ++n) all.push_back(pi * pi * (m * m / (a * a) + n * n / (b * b)));
  }
  std::sort(all.begin(), all.end());
  all.resize(std::max(0, count));
  return all;
}

double strip_room_energy(int j) {
  if (j < 1) throw ValidationError("room index must be at least 1");
  const double a = pi / (pi - 1.0 / j);
  // 2^(2j) - 2^(2j-1) = 2^(2j-1); written this way it underflows instead of overflowing
  const double b = std::ldexp(pi, 1 - 2 * j);
  return a * a + b * b;
}

void write_csv(std::ostream& os) {
  os << "name,value\n" << std::setprecision(17);
  os << "transcendental_root_L1_c5," << transcendental_root(1.0, 5.0) << "\n";
  const HalfStripSpec hs{halfstrip_ell_for(2, 1.0, 5.0), 1.0, 5.0};
  const auto sp = halfstrip_spectrum(hs, 3);
  os << "halfstrip_m2_ell," << hs.ell << "\n";
  os << "halfstrip_m2_sigma," << sp.sigma << "\n";
  for (std::size_t j = 0; j < sp.eigenvalues.size(); ++j) {
    os << "halfstrip_m2_lambda_" << j + 1 << "," << sp.eigenvalues[j] << "\n";
  }
  const auto sq = rectangle_eigs(pi, pi, 3);
  for (std::size_t j = 0; j < sq.size(); ++j) os << "square_lambda_" << j + 1 << "," << sq[j] << "\n";
  for (const int j : {1, 2, 5, 10, 20}) os << "strip_room_energy_" << j << "," << strip_room_energy(j) << "\n";
}

}  // namespace specpart::oracles
