#include "specpart/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <variant>

#include "specpart/errors.hpp"
#include "specpart/json_util.hpp"

namespace specpart {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rect {
  Point lo, hi;
};
struct Ball {
  Point center;
  double radius;
};
struct Annulus {
  Point center;
  double inner, outer;
};
struct Sector {
  Point center;
  double a0, span, inner, outer;
};
struct HalfStrip {
  double x0, y0, y1;
};
struct Complement {
  std::shared_ptr<const Region::Node> arg;
};
struct Combine {
  enum class Op { kUnion, kInter, kDiff } op;
  std::shared_ptr<const Region::Node> a, b;
};

double radius_of(const Point& x, const Point& c) { return std::hypot(x[0] - c[0], x[1] - c[1]); }

}  // namespace

struct Region::Node {
  std::variant<Rect, Ball, Annulus, Sector, HalfStrip, Complement, Combine> data;

  double depth(const Point& x) const {
    return std::visit([&](const auto& d) { return eval(d, x); }, data);
  }

 private:
  static double eval(const Rect& r, const Point& x) {
    double d = std::min(x[0] - r.lo[0], r.hi[0] - x[0]);
    if (r.lo[1] != r.hi[1] || r.lo[1] != 0.0) d = std::min({d, x[1] - r.lo[1], r.hi[1] - x[1]});
    return d;
  }
  static double eval(const Ball& b, const Point& x) { return b.radius - radius_of(x, b.center); }
  static double eval(const Annulus& a, const Point& x) {
    const double rho = radius_of(x, a.center);
    return std::min(rho - a.inner, a.outer - rho);
  }
  static double eval(const Sector& s, const Point& x) {
    const double rho = radius_of(x, s.center);
    double d = std::min(rho - s.inner, s.outer - rho);
    if (s.span < 2.0 * std::numbers::pi) {
      double theta = std::atan2(x[1] - s.center[1], x[0] - s.center[0]) - s.a0;
      theta = std::fmod(theta, 2.0 * std::numbers::pi);
      if (theta < 0.0) theta += 2.0 * std::numbers::pi;
      // angular depth measured as arc length; the far side of the wedge is negative
      const double inside = std::min(theta, s.span - theta);
      const double outside = std::min(theta - s.span, 2.0 * std::numbers::pi - theta);
      d = std::min(d, theta <= s.span ? rho * inside : -rho * outside);
    }
    return d;
  }
  static double eval(const HalfStrip& s, const Point& x) {
    double d = x[0] - s.x0;
    if (s.y0 != s.y1) d = std::min({d, x[1] - s.y0, s.y1 - x[1]});
    return d;
  }
  static double eval(const Complement& c, const Point& x) { return -c.arg->depth(x); }
  static double eval(const Combine& c, const Point& x) {
    const double a = c.a->depth(x);
    const double b = c.b->depth(x);
    switch (c.op) {
      case Combine::Op::kUnion:
        return std::max(a, b);
      case Combine::Op::kInter:
        return std::min(a, b);
      case Combine::Op::kDiff:
        return std::min(a, -b);
    }
    return -kInf;
  }
};

Region Region::rect(Point lo, Point hi) {
  if (!(lo[0] <= hi[0]) || !(lo[1] <= hi[1])) throw ValidationError("rect corners out of order");
  return Region(std::make_shared<Node>(Node{Rect{lo, hi}}));
}

Region Region::ball(Point center, double radius) {
  if (!(radius >= 0.0)) throw ValidationError("ball radius must be non-negative");
  return Region(std::make_shared<Node>(Node{Ball{center, radius}}));
}

Region Region::annulus(Point center, double inner, double outer) {
  if (!(inner >= 0.0) || !(inner < outer)) throw ValidationError("annulus requires 0 <= r < R");
  return Region(std::make_shared<Node>(Node{Annulus{center, inner, outer}}));
}

Region Region::sector(Point center, double a0, double a1, double inner, double outer) {
  const double span = a1 - a0;
  if (!(span > 0.0) || span > 2.0 * std::numbers::pi + 1e-12) throw ValidationError("sector angle range invalid");
  if (!(inner >= 0.0) || !(inner < outer)) throw ValidationError("sector requires 0 <= r < R");
  return Region(std::make_shared<Node>(Node{Sector{center, a0, span, inner, outer}}));
}

Region Region::halfstrip(double x0, double y0, double y1) {
  if (y1 < y0) throw ValidationError("halfstrip requires y0 <= y1");
  return Region(std::make_shared<Node>(Node{HalfStrip{x0, y0, y1}}));
}

Region Region::operator|(const Region& other) const {
  return Region(std::make_shared<Node>(Node{Combine{Combine::Op::kUnion, node_, other.node_}}));
}

Region Region::operator&(const Region& other) const {
  return Region(std::make_shared<Node>(Node{Combine{Combine::Op::kInter, node_, other.node_}}));
}

Region Region::operator-(const Region& other) const {
  return Region(std::make_shared<Node>(Node{Combine{Combine::Op::kDiff, node_, other.node_}}));
}

Region Region::complement() const { return Region(std::make_shared<Node>(Node{Complement{node_}})); }

double Region::depth(const Point& x) const { return node_->depth(x); }

Region Region::from_json(const nlohmann::json& j) {
  const std::string type = require_key(j, "type").get<std::string>();
  const auto center = [&] { return j.contains("center") ? parse_point(j.at("center")) : Point{0.0, 0.0}; };
  if (type == "rect") return rect(parse_point(require_key(j, "lo")), parse_point(require_key(j, "hi")));
  if (type == "ball") return ball(center(), parse_scalar(require_key(j, "radius")));
  if (type == "annulus") return annulus(center(), parse_scalar(require_key(j, "r")), parse_scalar(require_key(j, "R")));
  if (type == "sector") {
    const auto& angles = require_key(j, "angles");
    if (!angles.is_array() || angles.size() != 2) throw ValidationError("sector angles must be [a0, a1]");
    const double inner = j.contains("r") ? parse_scalar(j.at("r")) : 0.0;
    const double outer = j.contains("R") ? parse_scalar(j.at("R")) : kInf;
    return sector(center(), parse_scalar(angles[0]), parse_scalar(angles[1]), inner, outer);
  }
  if (type == "halfstrip") {
    double y0 = 0.0, y1 = 0.0;
    if (j.contains("y")) {
      const Point y = parse_point(j.at("y"));
      y0 = y[0];
      y1 = y[1];
    }
    return halfstrip(parse_scalar(require_key(j, "x0")), y0, y1);
  }
  if (type == "union" || type == "inter" || type == "diff") {
    const auto& of = require_key(j, "of");
    if (!of.is_array() || of.empty()) throw ValidationError(type + " needs a non-empty 'of' list");
    if (type == "diff" && of.size() < 2) throw ValidationError("diff needs at least two operands");
    Region acc = from_json(of[0]);
    for (std::size_t i = 1; i < of.size(); ++i) {
      const Region next = from_json(of[i]);
      acc = type == "union" ? (acc | next) : type == "inter" ? (acc & next) : (acc - next);
    }
    return acc;
  }
  throw ValidationError("unknown region type '" + type + "'");
}

}  // namespace specpart
