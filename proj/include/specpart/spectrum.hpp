#pragma once

#include <limits>
#include <map>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specpart/eigensolver.hpp"

namespace specpart {

struct SweepEntry {
  double r = 0.0;
  double lambda = 0.0;
  bool monotone_ok = true;  // lambda >= previous lambda - 1e-8
};

struct AnnulusEntry {
  double r = 0.0;
  double R = 0.0;
  double lambda = 0.0;
  bool monotone_ok = true;  // lambda <= previous lambda + 1e-8
};

/// lambda(base \ closed ball B_r) for increasing r, with the optional
/// annulus values lambda(base & A_{r,R}) at fixed r for increasing R.
struct PerssonSweep {
  std::vector<SweepEntry> entries;
  std::vector<AnnulusEntry> annulus;

  /// True when every monotonicity check passed; a violation indicates
  /// that the window is too small for the radii.
  bool monotone() const;
};

inline constexpr double kMonotoneTol = 1e-8;

struct SweepOptions {
  double tol = kDefaultTol;
  Point center{0.0, 0.0};
  double annulus_r = 0.0;
  std::vector<double> annulus_R;  // empty: no annulus refinement
};

/// Throws EmptyMask when base \ B_r has no interior point, BadRadii when
/// the radii are not strictly increasing.
PerssonSweep persson_sweep(const DomainMask& base, const Potential& V, std::span<const double> radii,
                           const SweepOptions& opt = {});

struct SigmaEstimate {
  double sigma = 0.0;         // last sweep value, or +inf
  double extrapolated = 0.0;  // A + B/r fitted through the last two points, r -> inf
  double uncertainty = 0.0;   // |sigma - extrapolated|
};

inline constexpr double kSigmaCap = 30.0;

/// Throws InsufficientSweep for fewer than 3 radii. Returns +inf (with
/// zero uncertainty) when the last value exceeds `cap` and is still rising
/// by more than 1% per step, the compact-resolvent regime.
SigmaEstimate sigma_estimate(const PerssonSweep& sweep, double cap = kSigmaCap);

struct ThresholdReport {
  int k = 1;
  double p = 1.0;
  double sigma = 0.0;
  double sigma_uncertainty = 0.0;
  double lambda_prev = 0.0;
  double threshold = 0.0;
  double lambda_k = std::numeric_limits<double>::quiet_NaN();
  bool strict = false;
  double margin = std::numeric_limits<double>::quiet_NaN();
  bool upper_bound_ok = true;  // T <= k^(1/p) sigma
};

/// T = (lambda_prev^p + sigma^p)^(1/p), or sigma for p = inf. `lambda_k`
/// (optional, NaN when unknown) is compared against T - uncertainty.
ThresholdReport threshold(int k, double p, double sigma, double lambda_prev,
                          double lambda_k = std::numeric_limits<double>::quiet_NaN(), double uncertainty = 0.0);

/// Keys k, p, sigma, lambda_prev, threshold, lambda_k, strict, margin
/// (infinite values as "inf").
nlohmann::json to_json(const ThresholdReport& r);

/// max{k : Lambda_k <= c} for energies indexed from k = 1.
int partition_count(std::span<const double> energies_by_k, double c);

struct CountBoundsReport {
  double c = 0.0;
  int N = 0;                   // eigenvalues <= c
  std::map<double, int> counts;  // p -> partition count, inf allowed
  bool pass = false;
};

/// Checks N_p(c) <= N_inf(c) <= N(c) for every supplied p.
CountBoundsReport count_bounds(const DiscreteForm& form, double c, const std::map<double, int>& partition_counts);

nlohmann::json to_json(const CountBoundsReport& r);

}  // namespace specpart
