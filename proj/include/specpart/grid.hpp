#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace specpart {

using Point = std::array<double, 2>;

/// Uniform Cartesian grid covering the truncation window. Axis 0 is x,
/// axis 1 is y; storage is row-major over (count[0], count[1]), so the
/// y index runs fastest. A 1-D grid has count[1] == 1.
class GridSpec {
 public:
  GridSpec() = default;

  /// Throws ValidationError unless h > 0, dim is 1 or 2 and every used
  /// axis has at least 3 points.
  GridSpec(int dim, Point origin, std::array<int, 2> count, double h);

  /// Grid spanning [lo, hi] per axis; (hi - lo) must be an integer
  /// multiple of h to within 1e-9 relative.
  static GridSpec window(int dim, Point lo, Point hi, double h);

  int dim() const noexcept { return dim_; }
  double h() const noexcept { return h_; }
  const Point& origin() const noexcept { return origin_; }
  const std::array<int, 2>& count() const noexcept { return count_; }
  double extent(int axis) const noexcept { return (count_[axis] - 1) * h_; }
  Point upper() const noexcept;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(count_[0]) * static_cast<std::size_t>(count_[1]);
  }
  std::size_t index(int i0, int i1 = 0) const noexcept {
    return static_cast<std::size_t>(i0) * count_[1] + static_cast<std::size_t>(i1);
  }
  std::array<int, 2> multi_index(std::size_t idx) const noexcept {
    return {static_cast<int>(idx / count_[1]), static_cast<int>(idx % count_[1])};
  }
  Point coords(std::size_t idx) const noexcept;

  /// True on the outermost layer of the window (never a degree of freedom).
  bool on_window_boundary(std::size_t idx) const noexcept;

  /// Quadrature weight h^d.
  double cell_volume() const noexcept;

  /// Grid neighbours along the axes (2 in 1-D, 4 in 2-D), excluding
  /// indices outside the window.
  void neighbours(std::size_t idx, std::vector<std::size_t>& out) const;

  bool operator==(const GridSpec& other) const noexcept;

 private:
  int dim_ = 1;
  Point origin_{0.0, 0.0};
  std::array<int, 2> count_{3, 1};
  double h_ = 1.0;
};

}  // namespace specpart
