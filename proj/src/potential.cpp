#include "specpart/potential.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "specpart/errors.hpp"
#include "specpart/json_util.hpp"

namespace specpart {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// fraction of [a, b] lying beyond t
double fraction_above(double a, double b, double t) { return std::clamp((b - t) / (b - a), 0.0, 1.0); }

// Average of the radial step over the dual cell of x.
double radial_cell_average(const Potential::RadialStep& s, const Point& x, double h, int dim) {
  const double half = 0.5 * h;
  if (dim == 1) {
    const double a = x[0] - half, b = x[0] + half;
    const double inside = std::max(0.0, std::min(b, s.r) - std::max(a, -s.r));
    return s.c * (1.0 - inside / h);
  }
  // nearest and farthest distance from the origin to the cell
  const double nx = std::max({0.0, std::abs(x[0]) - half});
  const double ny = std::max({0.0, std::abs(x[1]) - half});
  const double fx = std::abs(x[0]) + half, fy = std::abs(x[1]) + half;
  if (std::hypot(nx, ny) >= s.r) return s.c;
  if (std::hypot(fx, fy) <= s.r) return 0.0;
  constexpr int kSub = 16;
  int outside = 0;
  for (int a = 0; a < kSub; ++a) {
    for (int b = 0; b < kSub; ++b) {
      const double px = x[0] - half + (a + 0.5) * h / kSub;
      const double py = x[1] - half + (b + 0.5) * h / kSub;
      if (std::hypot(px, py) >= s.r) ++outside;
    }
  }
  return s.c * outside / static_cast<double>(kSub * kSub);
}

}  // namespace

Potential Potential::axial_step(double L, double c) {
  if (!(L > 0.0) || !(c > 0.0)) throw ValidationError("axial_step requires L > 0 and c > 0");
  return Potential(AxialStep{L, c});
}

Potential Potential::radial_step(double r, double c) {
  if (!(r > 0.0) || !(c > 0.0)) throw ValidationError("radial_step requires r > 0 and c > 0");
  return Potential(RadialStep{r, c});
}

Potential Potential::tabulated(std::vector<double> values) {
  for (const double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("potential must be finite and non-negative");
  }
  return Potential(Tabulated{std::move(values)});
}

Potential Potential::from_json(const nlohmann::json& j) {
  if (j.is_string()) return from_json(nlohmann::json{{"type", j}});
  const std::string type = require_key(j, "type").get<std::string>();
  if (type == "zero") return zero();
  if (type == "harmonic") return harmonic();
  if (type == "axial_step") return axial_step(parse_scalar(require_key(j, "L")), parse_scalar(require_key(j, "c")));
  if (type == "radial_step") return radial_step(parse_scalar(require_key(j, "r")), parse_scalar(require_key(j, "c")));
  if (type == "tabulated") {
    std::vector<double> values;
    for (const auto& v : require_key(j, "values")) values.push_back(parse_scalar(v));
    return tabulated(std::move(values));
  }
  throw ValidationError("unknown potential type '" + type + "'");
}

nlohmann::json Potential::to_json() const {
  return std::visit(Overloaded{
                        [](const Zero&) { return nlohmann::json{{"type", "zero"}}; },
                        [](const Harmonic&) { return nlohmann::json{{"type", "harmonic"}}; },
                        [](const AxialStep& s) { return nlohmann::json{{"type", "axial_step"}, {"L", s.L}, {"c", s.c}}; },
                        [](const RadialStep& s) { return nlohmann::json{{"type", "radial_step"}, {"r", s.r}, {"c", s.c}}; },
                        [](const Tabulated& t) { return nlohmann::json{{"type", "tabulated"}, {"values", t.values}}; },
                    },
                    v_);
}

std::string Potential::name() const { return to_json().at("type").get<std::string>(); }

double Potential::at(const Point& x) const {
  return std::visit(Overloaded{
                        [](const Zero&) { return 0.0; },
                        [&](const Harmonic&) { return x[0] * x[0] + x[1] * x[1]; },
                        [&](const AxialStep& s) { return x[0] > s.L ? s.c : 0.0; },
                        [&](const RadialStep& s) { return std::hypot(x[0], x[1]) < s.r ? 0.0 : s.c; },
                        [](const Tabulated&) -> double {
                          throw ValidationError("tabulated potential has no off-grid values");
                        },
                    },
                    v_);
}

std::vector<double> Potential::sample(const GridSpec& grid) const {
  std::vector<double> out(grid.size(), 0.0);
  const double h = grid.h();
  const int dim = grid.dim();
  std::visit(Overloaded{
                 [](const Zero&) {},
                 [&](const Harmonic&) {
                   // exact dual-cell mean of |x|^2
                   for (std::size_t i = 0; i < out.size(); ++i) {
                     const Point x = grid.coords(i);
                     out[i] = x[0] * x[0] + x[1] * x[1] + dim * h * h / 12.0;
                   }
                 },
                 [&](const AxialStep& s) {
                   for (std::size_t i = 0; i < out.size(); ++i) {
                     const double x = grid.coords(i)[0];
                     out[i] = s.c * fraction_above(x - 0.5 * h, x + 0.5 * h, s.L);
                   }
                 },
                 [&](const RadialStep& s) {
                   for (std::size_t i = 0; i < out.size(); ++i) out[i] = radial_cell_average(s, grid.coords(i), h, dim);
                 },
                 [&](const Tabulated& t) {
                   if (t.values.size() != grid.size()) {
                     throw ValidationError("tabulated potential has " + std::to_string(t.values.size()) +
                                           " values, grid has " + std::to_string(grid.size()) + " points");
                   }
                   out = t.values;
                 },
             },
             v_);
  return out;
}

}  // namespace specpart
