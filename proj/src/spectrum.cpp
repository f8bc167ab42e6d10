#include "specpart/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "specpart/errors.hpp"
#include "specpart/json_util.hpp"
#include "specpart/parallel.hpp"

namespace specpart {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_increasing(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i]) || (i > 0 && !(v[i] > v[i - 1]))) {
      throw BadRadii(std::string(what) + " must be finite, non-negative and strictly increasing");
    }
  }
}

double solve_on(const DomainMask& mask, const Potential& V, double tol, const std::string& what) {
  if (mask.is_empty()) throw EmptyMask(what + " has no interior grid point");
  return smallest_eigenpair(DiscreteForm(mask, V), tol).lambda;
}
}  // namespace

bool PerssonSweep::monotone() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.monotone_ok; }) &&
         std::all_of(annulus.begin(), annulus.end(), [](const auto& e) { return e.monotone_ok; });
}

PerssonSweep persson_sweep(const DomainMask& base, const Potential& V, std::span<const double> radii,
                           const SweepOptions& opt) {
  check_increasing(radii, "sweep radii");
  const GridSpec& g = base.grid();
  PerssonSweep out;
  out.entries.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    const DomainMask outside = base & build_mask_allow_empty(Region::ball(opt.center, radii[i]).complement(), g);
    out.entries[i] = {radii[i], solve_on(outside, V, opt.tol, "domain minus B_" + std::to_string(radii[i])), true};
  });
  for (std::size_t i = 1; i < out.entries.size(); ++i) {
    out.entries[i].monotone_ok = out.entries[i].lambda >= out.entries[i - 1].lambda - kMonotoneTol;
  }

  if (!opt.annulus_R.empty()) {
    check_increasing(opt.annulus_R, "annulus outer radii");
    if (!(opt.annulus_R.front() > opt.annulus_r)) throw BadRadii("annulus outer radii must exceed the inner radius");
    out.annulus.resize(opt.annulus_R.size());
    parallel_for(opt.annulus_R.size(), [&](std::size_t i) {
      const double R = opt.annulus_R[i];
      const DomainMask ring = base & build_mask_allow_empty(Region::annulus(opt.center, opt.annulus_r, R), g);
      out.annulus[i] = {opt.annulus_r, R, solve_on(ring, V, opt.tol, "annulus"), true};
    });
    for (std::size_t i = 1; i < out.annulus.size(); ++i) {
      out.annulus[i].monotone_ok = out.annulus[i].lambda <= out.annulus[i - 1].lambda + kMonotoneTol;
    }
  }
  return out;
}

SigmaEstimate sigma_estimate(const PerssonSweep& sweep, double cap) {
  const auto& e = sweep.entries;
  if (e.size() < 3) throw InsufficientSweep("sigma estimate needs at least 3 radii, got " + std::to_string(e.size()));
  const auto& a = e[e.size() - 2];
  const auto& b = e.back();
  SigmaEstimate out;
  if (b.lambda > cap && b.lambda - a.lambda > 0.01 * b.lambda) {
    out.sigma = out.extrapolated = kInf;
    out.uncertainty = 0.0;
    return out;
  }
  // lambda(r) ~ A + B/r through the last two points; A is the r -> inf limit
  const double B = (b.lambda - a.lambda) / (1.0 / b.r - 1.0 / a.r);
  out.sigma = b.lambda;
  out.extrapolated = b.lambda - B / b.r;
  out.uncertainty = std::abs(out.sigma - out.extrapolated);
  return out;
}

ThresholdReport threshold(int k, double p, double sigma, double lambda_prev, double lambda_k, double uncertainty) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (!(p >= 1.0)) throw ValidationError("p must be >= 1 or inf");
  if (!(sigma >= 0.0) || !(lambda_prev >= 0.0)) throw ValidationError("sigma and lambda_prev must be non-negative");
  if (!(uncertainty >= 0.0)) throw ValidationError("uncertainty must be non-negative");
  ThresholdReport r;
  r.k = k;
  r.p = p;
  r.sigma = sigma;
  r.sigma_uncertainty = uncertainty;
  r.lambda_prev = k == 1 ? 0.0 : lambda_prev;
  if (std::isinf(p) || std::isinf(sigma)) {
    r.threshold = std::isinf(p) ? sigma : kInf;
  } else {
    const double m = std::max(r.lambda_prev, sigma);
    r.threshold = m == 0.0 ? 0.0 : m * std::pow(std::pow(r.lambda_prev / m, p) + std::pow(sigma / m, p), 1.0 / p);
  }
  const double bound = std::isinf(p) ? sigma : std::pow(static_cast<double>(k), 1.0 / p) * sigma;
  r.upper_bound_ok = r.threshold <= bound * (1.0 + 1e-14);
  r.lambda_k = lambda_k;
  if (!std::isnan(lambda_k)) {
    r.margin = r.threshold - lambda_k;
    r.strict = std::isinf(r.threshold) ? std::isfinite(lambda_k) : lambda_k < r.threshold - uncertainty;
  }
  return r;
}

nlohmann::json to_json(const ThresholdReport& r) {
  return nlohmann::json{{"k", r.k},
                        {"p", scalar_to_json(r.p)},
                        {"sigma", scalar_to_json(r.sigma)},
                        {"sigma_uncertainty", r.sigma_uncertainty},
                        {"lambda_prev", scalar_to_json(r.lambda_prev)},
                        {"threshold", scalar_to_json(r.threshold)},
                        {"lambda_k", scalar_to_json(r.lambda_k)},
                        {"strict", r.strict},
                        {"margin", scalar_to_json(r.margin)},
                        {"upper_bound_ok", r.upper_bound_ok}};
}

int partition_count(std::span<const double> energies_by_k, double c) {
  int best = 0;
  for (std::size_t i = 0; i < energies_by_k.size(); ++i) {
    if (energies_by_k[i] <= c) best = static_cast<int>(i) + 1;
  }
  return best;
}

CountBoundsReport count_bounds(const DiscreteForm& form, double c, const std::map<double, int>& partition_counts) {
  CountBoundsReport r;
  r.c = c;
  r.N = count_below(form, c);
  r.counts = partition_counts;
  r.pass = true;
  const auto inf_it = partition_counts.find(kInf);
  for (const auto& [p, n] : partition_counts) {
    if (n > r.N) r.pass = false;
    if (inf_it != partition_counts.end() && std::isfinite(p) && n > inf_it->second) r.pass = false;
  }
  return r;
}

nlohmann::json to_json(const CountBoundsReport& r) {
  nlohmann::json counts = nlohmann::json::array();
  for (const auto& [p, n] : r.counts) counts.push_back({{"p", scalar_to_json(p)}, {"count", n}});
  return {{"c", r.c}, {"N", r.N}, {"partition_counts", counts}, {"pass", r.pass}};
}

}  // namespace specpart
