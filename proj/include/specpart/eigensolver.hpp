#pragma once

#include <span>
#include <vector>

#include "specpart/form.hpp"

namespace specpart {

inline constexpr double kDefaultTol = 1e-10;

struct Eigenpair {
  double lambda = 0.0;
  Field u;  // L2-normalized
  double residual = 0.0;  // |A u - lambda u|_2
};

/// Residual target actually used for a pair: tol * max(lambda, 1), but
/// never below the rounding floor of A u for a unit vector.
double residual_target(const DiscreteForm& form, double lambda, double tol);

/// Ground state: nonnegative, L2-normalized. `guess` (any field on the
/// same grid) seeds the iteration; values outside the mask are ignored.
Eigenpair smallest_eigenpair(const DiscreteForm& form, double tol = kDefaultTol, const Field* guess = nullptr);

/// k lowest eigenpairs in ascending order, L2-orthonormal, sign fixed so
/// that sum(u) >= 0. Throws ValidationError if k exceeds the dof count.
std::vector<Eigenpair> k_smallest(const DiscreteForm& form, int k, double tol = kDefaultTol,
                                  std::span<const Field> guesses = {});

/// Number of eigenvalues <= c (with multiplicity), by Sylvester inertia
/// of A - c I.
int count_below(const DiscreteForm& form, double c);

}  // namespace specpart
