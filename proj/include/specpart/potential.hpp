#pragma once

#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specpart/grid.hpp"

namespace specpart {

/// Non-negative potential V. Families follow the step and oscillator
/// examples; `Tabulated` carries one value per grid point.
class Potential {
 public:
  struct Zero {};
  /// 0 for x <= L, c for x > L (x = first coordinate).
  struct AxialStep {
    double L, c;
  };
  /// 0 inside B_r(0), c outside.
  struct RadialStep {
    double r, c;
  };
  /// |x|^2.
  struct Harmonic {};
  struct Tabulated {
    std::vector<double> values;
  };

  Potential() = default;

  static Potential zero() { return Potential(Zero{}); }
  static Potential axial_step(double L, double c);
  static Potential radial_step(double r, double c);
  static Potential harmonic() { return Potential(Harmonic{}); }
  /// Throws ValidationError on any negative or non-finite entry.
  static Potential tabulated(std::vector<double> values);

  static Potential from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::string name() const;

  /// Pointwise value (tabulated potentials cannot be evaluated off-grid).
  double at(const Point& x) const;

  /// Values used by the stencil: averages over the dual cell
  /// [x - h/2, x + h/2]^d of every grid point. Averaging keeps the
  /// discretization second order across the jumps of the step families.
  std::vector<double> sample(const GridSpec& grid) const;

  const auto& variant() const noexcept { return v_; }

 private:
  using Variant = std::variant<Zero, AxialStep, RadialStep, Harmonic, Tabulated>;
  explicit Potential(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

}  // namespace specpart
