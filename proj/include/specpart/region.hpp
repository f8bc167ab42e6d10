#pragma once

#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specpart/grid.hpp"

namespace specpart {

/// Open set described by a constructive expression tree. Every node
/// evaluates a signed depth: positive strictly inside, negative strictly
/// outside, on the order of the distance to the boundary near it. Union
/// is max, intersection min, difference min(a, -b), so `a - b` removes
/// the closure of b.
class Region {
 public:
  struct Node;

  static Region rect(Point lo, Point hi);
  static Region ball(Point center, double radius);
  /// Requires 0 <= inner < outer.
  static Region annulus(Point center, double inner, double outer);
  /// Angles in radians, counter-clockwise from +x, 0 < a1 - a0 <= 2 pi.
  /// outer may be +infinity.
  static Region sector(Point center, double a0, double a1, double inner, double outer);
  /// {x > x0, y0 < y < y1}; in 1-D the half-line x > x0.
  static Region halfstrip(double x0, double y0, double y1);

  Region operator|(const Region& other) const;
  Region operator&(const Region& other) const;
  Region operator-(const Region& other) const;
  /// Exterior of the closure, within whatever window it is evaluated on.
  Region complement() const;

  double depth(const Point& x) const;
  bool contains(const Point& x, double tol = 0.0) const { return depth(x) > tol; }

  /// Parses the declarative form; primitive names are rect, ball,
  /// annulus, sector, halfstrip, union, inter, diff.
  static Region from_json(const nlohmann::json& j);

 private:
  explicit Region(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace specpart
