#include "specpart/grid.hpp"

#include <cmath>
#include <string>

#include "specpart/errors.hpp"

namespace specpart {

GridSpec::GridSpec(int dim, Point origin, std::array<int, 2> count, double h)
    : dim_(dim), origin_(origin), count_(count), h_(h) {
  if (dim != 1 && dim != 2) throw ValidationError("grid dimension must be 1 or 2");
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("grid spacing must be positive");
  if (count_[0] < 3) throw ValidationError("grid needs at least 3 points per axis");
  if (dim == 1) {
    count_[1] = 1;
    origin_[1] = 0.0;
  } else if (count_[1] < 3) {
    throw ValidationError("grid needs at least 3 points per axis");
  }
}

GridSpec GridSpec::window(int dim, Point lo, Point hi, double h) {
  if (!(h > 0.0)) throw ValidationError("grid spacing must be positive");
  std::array<int, 2> count{1, 1};
  for (int a = 0; a < dim; ++a) {
    const double steps = (hi[a] - lo[a]) / h;
    const double rounded = std::round(steps);
    if (rounded < 2.0 || std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
      throw ValidationError("window extent along axis " + std::to_string(a) +
                            " is not an integer multiple of h (" + std::to_string(steps) + " steps)");
    }
    count[a] = static_cast<int>(rounded) + 1;
  }
  return GridSpec(dim, lo, count, h);
}

Point GridSpec::upper() const noexcept {
  return {origin_[0] + extent(0), dim_ == 2 ? origin_[1] + extent(1) : 0.0};
}

Point GridSpec::coords(std::size_t idx) const noexcept {
  const auto [i0, i1] = multi_index(idx);
  return {origin_[0] + i0 * h_, dim_ == 2 ? origin_[1] + i1 * h_ : 0.0};
}

bool GridSpec::on_window_boundary(std::size_t idx) const noexcept {
  const auto [i0, i1] = multi_index(idx);
  if (i0 == 0 || i0 == count_[0] - 1) return true;
  return dim_ == 2 && (i1 == 0 || i1 == count_[1] - 1);
}

double GridSpec::cell_volume() const noexcept { return dim_ == 1 ? h_ : h_ * h_; }

void GridSpec::neighbours(std::size_t idx, std::vector<std::size_t>& out) const {
  out.clear();
  const auto [i0, i1] = multi_index(idx);
  if (i0 > 0) out.push_back(idx - count_[1]);
  if (i0 + 1 < count_[0]) out.push_back(idx + count_[1]);
  if (dim_ == 2) {
    if (i1 > 0) out.push_back(idx - 1);
    if (i1 + 1 < count_[1]) out.push_back(idx + 1);
  }
}

bool GridSpec::operator==(const GridSpec& other) const noexcept {
  return dim_ == other.dim_ && count_ == other.count_ && h_ == other.h_ && origin_ == other.origin_;
}

}  // namespace specpart
