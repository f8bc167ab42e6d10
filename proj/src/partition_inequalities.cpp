#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "specpart/errors.hpp"
#include "specpart/partition.hpp"

namespace specpart {

InequalityReport check_differential_inequalities(const PartitionState& state, const DiscreteForm& base) {
  if (!state.converged) throw NotConverged("differential inequalities need a converged state");
  if (!std::isfinite(state.p)) throw NotConverged("differential inequalities are checked for p < inf");
  const int k = static_cast<int>(state.fields.size());
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const auto a = state.fields[i].values(), b = state.fields[j].values();
      for (std::size_t x = 0; x < a.size(); ++x) {
        if (a[x] != 0.0 && b[x] != 0.0) {
          throw OverlappingCells("fields " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " overlap");
        }
      }
    }
  }

  InequalityReport rep;
  std::vector<double> R;
  std::vector<Eigen::VectorXd> v;
  for (const auto& u : state.fields) R.push_back(base.rayleigh(u));
  // the common factor Lambda_{k,inf}^(p-1) only rescales every v_i; max R is used
  const double Rmax = *std::max_element(R.begin(), R.end());
  for (int i = 0; i < k; ++i) {
    rep.weights.push_back(std::pow(R[i] / Rmax, 0.5 * (state.p - 1.0)));
    v.push_back(rep.weights.back() * base.restrict(state.fields[i]));
  }
  const SparseMatrix& A = base.matrix();
  const double w = base.grid().cell_volume();
  auto measure = [&](const Eigen::VectorXd& r, double& l1, double& mx) {
    const Eigen::VectorXd pos = r.cwiseMax(0.0);
    l1 = w * pos.sum();
    mx = pos.size() ? pos.maxCoeff() : 0.0;
  };
  for (int i = 0; i < k; ++i) {
    double l1, mx;
    measure(A * v[i] - R[i] * v[i], l1, mx);
    rep.r1_l1.push_back(l1);
    rep.r1_max.push_back(mx);

    Eigen::VectorXd signed_sum = v[i];
    Eigen::VectorXd rhs = R[i] * v[i];
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      signed_sum -= v[j];
      rhs -= R[j] * v[j];
    }
    measure(rhs - A * signed_sum, l1, mx);
    rep.r2_l1.push_back(l1);
    rep.r2_max.push_back(mx);
  }
  for (int i = 0; i < k; ++i) {
    rep.max_l1 = std::max({rep.max_l1, rep.r1_l1[i], rep.r2_l1[i]});
    rep.max_pointwise = std::max({rep.max_pointwise, rep.r1_max[i], rep.r2_max[i]});
  }
  return rep;
}

nlohmann::json to_json(const InequalityReport& r) {
  return {{"weights", r.weights}, {"r1_l1", r.r1_l1}, {"r1_max", r.r1_max}, {"r2_l1", r.r2_l1},
          {"r2_max", r.r2_max},   {"max_l1", r.max_l1}, {"max_pointwise", r.max_pointwise}};
}

}  // namespace specpart
