#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specpart/spectrum.hpp"

namespace specpart {

/// p-norm of non-negative values; p = inf gives the max.
double p_norm(std::span<const double> values, double p);

/// k cells with pairwise disjoint supports and their L2-normalized ground
/// states (zero outside the cell).
struct PartitionState {
  int k = 0;
  double p = 1.0;
  std::vector<DomainMask> cells;
  std::vector<Field> fields;
  std::vector<double> lambdas;
  int iteration = 0;
  std::vector<double> history;  // Lambda_{k,p} per accepted iteration
  bool converged = false;
};

struct EnergyReport {
  double p = 1.0;
  std::vector<double> lambdas;   // lambda(omega_i)
  std::vector<double> rayleigh;  // R_V(u_i) on the base form
  double strong = 0.0;           // Lambda_{k,p}
  double relaxed = 0.0;          // L_{k,p}
  double gap = 0.0;              // max lambda - min lambda
  std::optional<ThresholdReport> threshold;
  std::vector<bool> ground_state;  // lambda_i < sigma, when sigma is known
};

nlohmann::json to_json(const EnergyReport& r);

/// Throws OverlappingCells, EmptyMask, NoConvergence.
EnergyReport energy_strong(std::span<const DomainMask> cells, const Potential& V, double p, double tol = kDefaultTol);

/// p-norm of the Rayleigh quotients on the base form; throws ZeroField.
double energy_relaxed(const PartitionState& state, const DiscreteForm& base);

/// Report for a state: cell eigenvalues from the state, Rayleigh quotients
/// on `base`, ground-state flags against sigma when finite or infinite.
EnergyReport make_report(const PartitionState& state, const DiscreteForm& base,
                         double sigma = std::numeric_limits<double>::quiet_NaN());

struct OptimizeOptions {
  double rel_tol = 1e-6;
  int patience = 3;
  int max_iter = 500;
  int starts = 8;
  std::uint64_t seed = 0;
  int max_reseeds = 3;
  double drop_tol = 1e-12;
  int band = 8;  // initial dilation of the competing fields, in grid layers
  double eig_tol = kDefaultTol;
  /// Starting cells (e.g. a ring partition or a previous optimum); when
  /// set, a single start is run from them.
  std::vector<DomainMask> initial_cells;
  /// Called with every accepted iterate, including the initial one.
  std::function<void(const PartitionState&)> observer;
};

struct OptimizeResult {
  PartitionState state;
  EnergyReport report;
  int best_start = 0;
  std::uint64_t start_seed = 0;
  int reseeds = 0;
};

/// Alternating minimization of the relaxed functional for p < inf.
/// Throws CellCollapse after max_reseeds, NoConvergence after max_iter.
OptimizeResult optimize(const DomainMask& domain, const Potential& V, int k, double p, const OptimizeOptions& opt = {});

struct PinfResult {
  OptimizeResult result;  // last stage; report.strong is the max-lambda energy
  std::vector<double> schedule;
  std::vector<double> stage_energy;  // Lambda_{k,p} at the end of each stage
  std::vector<double> stage_max;     // max_i lambda_i at the end of each stage
};

std::vector<double> default_p_schedule();

/// p-continuation along an increasing schedule, warm-starting each stage
/// from the previous minimizer. The result's report is evaluated at p = inf.
PinfResult optimize_pinf(const DomainMask& domain, const Potential& V, int k, std::span<const double> schedule,
                         const OptimizeOptions& opt = {});

struct RingOptions {
  Point center{0.0, 0.0};
  double r0 = 0.0;        // inner radius of the first annulus
  double gap = -1.0;      // spacing between annuli; default 2h
  int rings = -1;         // annuli to build; default k
  double tol = kDefaultTol;
};

struct RingPartition {
  std::vector<std::pair<double, double>> radii;
  std::vector<double> ring_lambdas;
  std::vector<DomainMask> cells;
  std::vector<double> cell_lambdas;
  double bound = 0.0;  // sigma + eps
  bool certified = false;
};

/// Greedy concentric annuli, each with lambda(domain & A_{r,R}) <= sigma + eps
/// and R minimal on the grid; assigned round-robin to k cells. Throws
/// ValidationError for infinite sigma, WindowTooSmall if fewer annuli fit.
RingPartition build_ring_partition(const DomainMask& domain, const Potential& V, int k, double eps, double sigma,
                                   const RingOptions& opt = {});

/// Smooth radial cutoffs phi = cos(theta), psi = sin(theta) with
/// theta = (pi/2) S(|x - center|/n - 1), S a C-infinity step from 0 to 1.
/// |grad theta| <= pi/n, hence the constant C = pi^2.
struct ImsResult {
  Field inner;   // u phi
  Field outer;   // u psi
  double residual = 0.0;  // |a(u) - a(u phi) - a(u psi)|
  double bound = 0.0;     // C |u|^2 / n^2 + 10 h
};

inline constexpr double kImsConstant = 9.869604401089358;  // pi^2

double smooth_step(double t);

/// Throws WindowTooSmall unless the window contains B_{2n}(center).
ImsResult ims_decompose(const DiscreteForm& form, const Field& u, double n, Point center = {0.0, 0.0});

struct InequalityReport {
  std::vector<double> weights;       // a_i
  std::vector<double> r1_l1, r1_max;  // (A v_i - R_i v_i)^+
  std::vector<double> r2_l1, r2_max;  // (R_i v_i - sum_j R_j v_j - A(v_i - sum_j v_j))^+
  double max_l1 = 0.0;
  double max_pointwise = 0.0;
};

nlohmann::json to_json(const InequalityReport& r);

/// Discrete residuals of the two optimality inequalities, tested against
/// non-negative mesh functions: the l1 value (h^d sum of positive parts) is
/// the supremum over test functions bounded by 1. Throws NotConverged for
/// an unconverged state or p = inf, OverlappingCells for shared supports.
InequalityReport check_differential_inequalities(const PartitionState& state, const DiscreteForm& base);

}  // namespace specpart
