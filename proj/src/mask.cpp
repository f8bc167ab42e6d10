#include "specpart/mask.hpp"

#include <algorithm>
#include <numeric>

#include "specpart/errors.hpp"

namespace specpart {

DomainMask::DomainMask(GridSpec grid, std::vector<std::uint8_t> interior, std::string label)
    : grid_(std::move(grid)), interior_(std::move(interior)), label_(std::move(label)) {
  if (interior_.size() != grid_.size()) throw ValidationError("mask size does not match grid");
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    if (interior_[i] && grid_.on_window_boundary(i)) interior_[i] = 0;
  }
}

DomainMask DomainMask::empty(GridSpec grid, std::string label) {
  std::vector<std::uint8_t> none(grid.size(), 0);
  return DomainMask(std::move(grid), std::move(none), std::move(label));
}

void DomainMask::set(std::size_t idx, bool value) {
  interior_[idx] = value && !grid_.on_window_boundary(idx) ? 1 : 0;
}

std::size_t DomainMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(interior_.begin(), interior_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> DomainMask::points() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    if (interior_[i]) out.push_back(i);
  }
  return out;
}

void DomainMask::check_grid(const DomainMask& other) const {
  if (!(grid_ == other.grid_)) throw GridMismatch("masks live on different grids");
}

bool DomainMask::subset_of(const DomainMask& other) const {
  check_grid(other);
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    if (interior_[i] && !other.interior_[i]) return false;
  }
  return true;
}

DomainMask DomainMask::operator&(const DomainMask& other) const {
  check_grid(other);
  std::vector<std::uint8_t> out(interior_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = interior_[i] & other.interior_[i];
  return DomainMask(grid_, std::move(out), label_);
}

DomainMask DomainMask::operator|(const DomainMask& other) const {
  check_grid(other);
  std::vector<std::uint8_t> out(interior_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = interior_[i] | other.interior_[i];
  return DomainMask(grid_, std::move(out), label_);
}

DomainMask DomainMask::operator-(const DomainMask& other) const {
  check_grid(other);
  std::vector<std::uint8_t> out(interior_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = interior_[i] & static_cast<std::uint8_t>(!other.interior_[i]);
  return DomainMask(grid_, std::move(out), label_);
}

DomainMask DomainMask::dilate(int layers, const DomainMask& within) const {
  check_grid(within);
  std::vector<std::uint8_t> cur = interior_;
  std::vector<std::size_t> nb;
  for (int layer = 0; layer < layers; ++layer) {
    std::vector<std::uint8_t> next = cur;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (!cur[i]) continue;
      grid_.neighbours(i, nb);
      for (const auto j : nb) {
        if (within.interior_[j]) next[j] = 1;
      }
    }
    cur = std::move(next);
  }
  return DomainMask(grid_, std::move(cur), label_);
}

DomainMask build_mask_allow_empty(const Region& region, const GridSpec& grid, std::string label) {
  // points within 1e-9 h of the boundary count as on it, hence excluded
  const double tol = 1e-9 * grid.h();
  std::vector<std::uint8_t> interior(grid.size(), 0);
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (grid.on_window_boundary(i)) continue;
    interior[i] = region.contains(grid.coords(i), tol) ? 1 : 0;
  }
  return DomainMask(grid, std::move(interior), std::move(label));
}

DomainMask build_mask(const Region& region, const GridSpec& grid, std::string label) {
  DomainMask mask = build_mask_allow_empty(region, grid, std::move(label));
  if (mask.is_empty()) throw EmptyMask("region '" + mask.label() + "' has no interior grid points");
  return mask;
}

bool disjoint(const DomainMask& a, const DomainMask& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("masks live on different grids");
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    if (da[i] && db[i]) return false;
  }
  return true;
}

DomainMask ring_union_mask(const GridSpec& grid, std::span<const std::pair<double, double>> radii, int k, int i,
                           const DomainMask* base, Point center) {
  if (k < 1 || i < 1 || i > k) throw ValidationError("ring index must satisfy 1 <= i <= k");
  if (radii.empty()) throw BadRadii("no annuli given");
  double last = -1.0;
  for (const auto& [r, R] : radii) {
    if (!(r > last) || !(R > r) || r < 0.0) throw BadRadii("annulus radii must interleave strictly");
    last = R;
  }
  DomainMask out = DomainMask::empty(grid, "ring " + std::to_string(i) + "/" + std::to_string(k));
  for (std::size_t j = 0; j < radii.size(); ++j) {
    // annulus numbering is 1-based
    if (static_cast<int>((j % static_cast<std::size_t>(k)) + 1) != i) continue;
    const auto ring = Region::annulus(center, radii[j].first, radii[j].second);
    out = out | build_mask_allow_empty(ring, grid);
  }
  if (base != nullptr) out = out & *base;
  out.set_label("ring " + std::to_string(i) + "/" + std::to_string(k));
  return out;
}

}  // namespace specpart
