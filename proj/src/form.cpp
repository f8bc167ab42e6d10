#include "specpart/form.hpp"

#include <cmath>
#include <limits>

#include "specpart/errors.hpp"

namespace specpart {

DiscreteForm::DiscreteForm(DomainMask mask, const Potential& V) : mask_(std::move(mask)) {
  potential_ = V.sample(mask_.grid());
  build();
}

DiscreteForm::DiscreteForm(DomainMask mask, std::vector<double> potential_samples)
    : mask_(std::move(mask)), potential_(std::move(potential_samples)) {
  if (potential_.size() != mask_.grid().size()) throw ValidationError("potential samples do not match grid");
  build();
}

void DiscreteForm::build() {
  if (mask_.is_empty()) throw EmptyMask("cannot assemble a form on an empty mask");
  const GridSpec& g = mask_.grid();
  points_ = mask_.points();
  dof_.assign(g.size(), -1);
  for (std::size_t d = 0; d < points_.size(); ++d) dof_[points_[d]] = static_cast<long>(d);

  const double inv_h2 = 1.0 / (g.h() * g.h());
  const double diag = 2.0 * g.dim() * inv_h2;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(points_.size() * (1 + 2 * g.dim()));
  std::vector<std::size_t> nb;
  vmin_ = std::numeric_limits<double>::infinity();
  norm_inf_ = 0.0;
  for (std::size_t d = 0; d < points_.size(); ++d) {
    const std::size_t p = points_[d];
    const double v = potential_[p];
    if (v < 0.0) throw ValidationError("potential must be non-negative");
    vmin_ = std::min(vmin_, v);
    triplets.emplace_back(d, d, diag + v);
    double row = diag + v;
    g.neighbours(p, nb);
    for (const auto q : nb) {
      // exterior neighbours carry the Dirichlet zero
      if (dof_[q] >= 0) {
        triplets.emplace_back(d, dof_[q], -inv_h2);
        row += inv_h2;
      }
    }
    norm_inf_ = std::max(norm_inf_, row);
  }
  A_.resize(static_cast<Eigen::Index>(points_.size()), static_cast<Eigen::Index>(points_.size()));
  A_.setFromTriplets(triplets.begin(), triplets.end());
  A_.makeCompressed();
}

Eigen::VectorXd DiscreteForm::restrict(const Field& u) const {
  if (!(u.grid() == grid())) throw GridMismatch("field and form live on different grids");
  Eigen::VectorXd x(static_cast<Eigen::Index>(points_.size()));
  const auto vals = u.values();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] != 0.0 && dof_[i] < 0) throw ValidationError("field is supported outside the form's mask");
  }
  for (std::size_t d = 0; d < points_.size(); ++d) x[static_cast<Eigen::Index>(d)] = vals[points_[d]];
  return x;
}

Field DiscreteForm::extend(const Eigen::VectorXd& x) const {
  std::vector<double> vals(grid().size(), 0.0);
  for (std::size_t d = 0; d < points_.size(); ++d) vals[points_[d]] = x[static_cast<Eigen::Index>(d)];
  return Field(mask_, std::move(vals));
}

double DiscreteForm::energy(const Field& u) const {
  const Eigen::VectorXd x = restrict(u);
  return grid().cell_volume() * x.dot(A_ * x);
}

double DiscreteForm::rayleigh(const Field& u) const {
  const Eigen::VectorXd x = restrict(u);
  const double nn = x.squaredNorm();
  if (!(nn > 0.0)) throw ZeroField("Rayleigh quotient of the zero field");
  return x.dot(A_ * x) / nn;
}

Field DiscreteForm::apply(const Field& u) const { return extend(A_ * restrict(u)); }

}  // namespace specpart
