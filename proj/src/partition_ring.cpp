#include <algorithm>
#include <cmath>

#include "specpart/errors.hpp"
#include "specpart/parallel.hpp"
#include "specpart/partition.hpp"

namespace specpart {

namespace {

double farthest_corner(const GridSpec& g, Point c) {
  const Point lo = g.origin(), hi = g.upper();
  double d = 0.0;
  for (const double x : {lo[0], hi[0]}) {
    for (const double y : {lo[1], hi[1]}) d = std::max(d, std::hypot(x - c[0], y - c[1]));
  }
  return d;
}

}  // namespace

RingPartition build_ring_partition(const DomainMask& domain, const Potential& V, int k, double eps, double sigma,
                                   const RingOptions& opt) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (!std::isfinite(sigma)) throw ValidationError("ring partitions need a finite sigma");
  const GridSpec& g = domain.grid();
  const double h = g.h();
  const double gap = opt.gap > 0.0 ? opt.gap : 2.0 * h;
  const int rings = opt.rings > 0 ? opt.rings : k;
  const double rmax = farthest_corner(g, opt.center) + h;
  const std::vector<double> samples = V.sample(g);

  RingPartition out;
  out.bound = sigma + eps;
  auto ring_lambda = [&](double r, double R) {
    const DomainMask m = domain & build_mask_allow_empty(Region::annulus(opt.center, r, R), g);
    if (m.is_empty()) return std::numeric_limits<double>::infinity();
    return smallest_eigenpair(DiscreteForm(m, samples), opt.tol).lambda;
  };

  double r = opt.r0;
  while (static_cast<int>(out.radii.size()) < rings) {
    // lambda decreases in R, so bisect on the grid of outer radii r + j h
    int lo = 1, hi = static_cast<int>(std::ceil((rmax - r) / h));
    if (hi < 1 || ring_lambda(r, r + hi * h) > out.bound) {
      throw WindowTooSmall("only " + std::to_string(out.radii.size()) + " of " + std::to_string(rings) +
                           " annuli with lambda <= sigma + eps fit in the window");
    }
    while (lo < hi) {
      const int mid = lo + (hi - lo) / 2;
      if (ring_lambda(r, r + mid * h) <= out.bound) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    const double R = r + hi * h;
    out.radii.emplace_back(r, R);
    out.ring_lambdas.push_back(ring_lambda(r, R));
    r = R + gap;
  }

  out.cells.resize(k);
  out.cell_lambdas.resize(k);
  parallel_for(k, [&](std::size_t i) {
    out.cells[i] = ring_union_mask(g, out.radii, k, static_cast<int>(i) + 1, &domain, opt.center);
    out.cell_lambdas[i] = out.cells[i].is_empty() ? std::numeric_limits<double>::infinity()
                                                  : smallest_eigenpair(DiscreteForm(out.cells[i], samples), opt.tol).lambda;
  });
  out.certified = *std::max_element(out.cell_lambdas.begin(), out.cell_lambdas.end()) <= out.bound;
  return out;
}

}  // namespace specpart
