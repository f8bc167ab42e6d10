#pragma once

#include <span>
#include <vector>

#include "specpart/mask.hpp"

namespace specpart {

/// Discrete function on a mask. Values are stored over the full window
/// and vanish outside the mask.
class Field {
 public:
  Field() = default;
  explicit Field(DomainMask mask);
  /// Throws ValidationError if values are nonzero outside the mask.
  Field(DomainMask mask, std::vector<double> values);

  const DomainMask& mask() const noexcept { return mask_; }
  const GridSpec& grid() const noexcept { return mask_.grid(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t idx) const noexcept { return values_[idx]; }
  void set(std::size_t idx, double v);

  /// L2 norm with quadrature weight h^d.
  double norm() const;
  Field scaled(double factor) const;
  /// Throws ZeroField for the zero function.
  Field normalized() const;
  bool is_zero() const;

  /// Same values viewed on a larger mask (support must stay inside).
  Field on_mask(const DomainMask& larger) const;

 private:
  DomainMask mask_;
  std::vector<double> values_;
};

/// L2 inner product (h^d weighted). Fields must share a grid.
double dot(const Field& a, const Field& b);

}  // namespace specpart
