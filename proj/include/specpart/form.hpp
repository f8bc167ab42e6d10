#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "specpart/field.hpp"
#include "specpart/mask.hpp"
#include "specpart/potential.hpp"

namespace specpart {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete Dirichlet form of -Delta + V on a mask: the 3-point (1-D) or
/// 5-point (2-D) stencil over the interior points, exterior rows
/// eliminated. a(u) = h^d * u^T A u.
class DiscreteForm {
 public:
  /// Throws EmptyMask for an empty mask, ValidationError for a potential
  /// that does not fit the grid.
  DiscreteForm(DomainMask mask, const Potential& V);
  DiscreteForm(DomainMask mask, std::vector<double> potential_samples);

  const DomainMask& mask() const noexcept { return mask_; }
  const GridSpec& grid() const noexcept { return mask_.grid(); }
  std::size_t dofs() const noexcept { return points_.size(); }
  const SparseMatrix& matrix() const noexcept { return A_; }
  /// Potential samples over the full window.
  std::span<const double> potential() const noexcept { return potential_; }
  /// Smallest potential value over the degrees of freedom.
  double potential_min() const noexcept { return vmin_; }
  /// max row sum of |A|, the scale of rounding error in A u
  double norm_inf() const noexcept { return norm_inf_; }

  std::size_t point_of_dof(std::size_t dof) const noexcept { return points_[dof]; }
  /// -1 for points that are not degrees of freedom.
  long dof_of_point(std::size_t idx) const noexcept { return dof_[idx]; }

  /// Values at the degrees of freedom; throws ValidationError if the
  /// field is supported outside the mask.
  Eigen::VectorXd restrict(const Field& u) const;
  Field extend(const Eigen::VectorXd& x) const;

  /// a_V(u): gradient energy plus potential energy, h^d weighted.
  double energy(const Field& u) const;
  /// a_V(u) / |u|^2; throws ZeroField.
  double rayleigh(const Field& u) const;
  /// A u on the mask.
  Field apply(const Field& u) const;

 private:
  void build();

  DomainMask mask_;
  std::vector<double> potential_;
  std::vector<std::size_t> points_;
  std::vector<long> dof_;
  SparseMatrix A_;
  double vmin_ = 0.0;
  double norm_inf_ = 0.0;
};

inline DiscreteForm assemble(const DomainMask& mask, const Potential& V) { return DiscreteForm(mask, V); }

}  // namespace specpart
