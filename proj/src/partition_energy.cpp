#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "specpart/errors.hpp"
#include "specpart/json_util.hpp"
#include "specpart/parallel.hpp"
#include "specpart/partition.hpp"

namespace specpart {

double p_norm(std::span<const double> values, double p) {
  if (values.empty()) return 0.0;
  const double m = *std::max_element(values.begin(), values.end());
  if (std::isinf(p) || m <= 0.0 || std::isinf(m)) return m;
  double s = 0.0;
  for (const double v : values) s += std::pow(v / m, p);
  return m * std::pow(s, 1.0 / p);
}

EnergyReport energy_strong(std::span<const DomainMask> cells, const Potential& V, double p, double tol) {
  if (!(p >= 1.0)) throw ValidationError("p must be >= 1 or inf");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].is_empty()) throw EmptyMask("cell " + std::to_string(i + 1) + " is empty");
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      if (!disjoint(cells[i], cells[j])) {
        throw OverlappingCells("cells " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " overlap");
      }
    }
  }
  EnergyReport r;
  r.p = p;
  r.lambdas.resize(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    r.lambdas[i] = smallest_eigenpair(DiscreteForm(cells[i], V), tol).lambda;
  });
  r.rayleigh = r.lambdas;
  r.strong = r.relaxed = p_norm(r.lambdas, p);
  const auto [lo, hi] = std::minmax_element(r.lambdas.begin(), r.lambdas.end());
  r.gap = cells.empty() ? 0.0 : *hi - *lo;
  return r;
}

double energy_relaxed(const PartitionState& state, const DiscreteForm& base) {
  std::vector<double> R;
  for (const auto& u : state.fields) R.push_back(base.rayleigh(u));
  return p_norm(R, state.p);
}

EnergyReport make_report(const PartitionState& state, const DiscreteForm& base, double sigma) {
  EnergyReport r;
  r.p = state.p;
  r.lambdas = state.lambdas;
  for (const auto& u : state.fields) r.rayleigh.push_back(base.rayleigh(u));
  r.strong = p_norm(r.lambdas, state.p);
  r.relaxed = p_norm(r.rayleigh, state.p);
  if (!r.lambdas.empty()) {
    const auto [lo, hi] = std::minmax_element(r.lambdas.begin(), r.lambdas.end());
    r.gap = *hi - *lo;
  }
  if (!std::isnan(sigma)) {
    for (const double l : r.lambdas) r.ground_state.push_back(l < sigma);
  }
  return r;
}

nlohmann::json to_json(const EnergyReport& r) {
  nlohmann::json j{{"p", scalar_to_json(r.p)},
                   {"lambdas", r.lambdas},
                   {"rayleigh", r.rayleigh},
                   {"energy_strong", r.strong},
                   {"energy_relaxed", r.relaxed},
                   {"equipartition_gap", r.gap}};
  if (r.threshold) j["threshold"] = to_json(*r.threshold);
  if (!r.ground_state.empty()) j["ground_state_below_sigma"] = r.ground_state;
  return j;
}

}  // namespace specpart
