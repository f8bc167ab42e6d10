#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specpart/grid.hpp"
#include "specpart/region.hpp"

namespace specpart {

/// Discretized open set: the grid points that are interior degrees of
/// freedom. The outermost window layer is never interior.
class DomainMask {
 public:
  DomainMask() = default;
  DomainMask(GridSpec grid, std::vector<std::uint8_t> interior, std::string label = {});

  /// All-false mask on the grid.
  static DomainMask empty(GridSpec grid, std::string label = {});

  const GridSpec& grid() const noexcept { return grid_; }
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  bool operator[](std::size_t idx) const noexcept { return interior_[idx] != 0; }
  void set(std::size_t idx, bool value);
  std::span<const std::uint8_t> data() const noexcept { return interior_; }

  std::size_t count() const noexcept;
  bool is_empty() const noexcept { return count() == 0; }
  std::vector<std::size_t> points() const;

  /// True when every interior point of this mask is interior in other.
  bool subset_of(const DomainMask& other) const;

  DomainMask operator&(const DomainMask& other) const;
  DomainMask operator|(const DomainMask& other) const;
  DomainMask operator-(const DomainMask& other) const;

  /// Grows the mask by `layers` grid steps (axis neighbours), staying
  /// inside `within`.
  DomainMask dilate(int layers, const DomainMask& within) const;

  bool operator==(const DomainMask& other) const noexcept {
    return grid_ == other.grid_ && interior_ == other.interior_;
  }

 private:
  void check_grid(const DomainMask& other) const;

  GridSpec grid_;
  std::vector<std::uint8_t> interior_;
  std::string label_;
};

/// Marks the grid points strictly inside both region and window.
/// Throws EmptyMask if none remain.
DomainMask build_mask(const Region& region, const GridSpec& grid, std::string label = {});

/// Same as build_mask but returns an empty mask instead of throwing.
DomainMask build_mask_allow_empty(const Region& region, const GridSpec& grid, std::string label = {});

/// True iff no grid point is interior in both. Throws GridMismatch.
bool disjoint(const DomainMask& a, const DomainMask& b);

/// Union of the annuli A_{r_j, R_j} with j = i (mod k), 1 <= i <= k,
/// intersected with `base` when given. Radii must interleave strictly:
/// r_1 < R_1 < r_2 < R_2 < ...; throws BadRadii otherwise.
DomainMask ring_union_mask(const GridSpec& grid, std::span<const std::pair<double, double>> radii, int k, int i,
                           const DomainMask* base = nullptr, Point center = {0.0, 0.0});

}  // namespace specpart
