#include "specpart/field.hpp"

#include <cmath>

#include "specpart/errors.hpp"

namespace specpart {

Field::Field(DomainMask mask) : mask_(std::move(mask)), values_(mask_.grid().size(), 0.0) {}

Field::Field(DomainMask mask, std::vector<double> values) : mask_(std::move(mask)), values_(std::move(values)) {
  if (values_.size() != mask_.grid().size()) throw ValidationError("field size does not match grid");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] != 0.0 && !mask_[i]) throw ValidationError("field has support outside its mask");
  }
}

void Field::set(std::size_t idx, double v) {
  if (v != 0.0 && !mask_[idx]) throw ValidationError("field value outside mask");
  values_[idx] = v;
}

double Field::norm() const {
  double s = 0.0;
  for (const double v : values_) s += v * v;
  return std::sqrt(s * grid().cell_volume());
}

Field Field::scaled(double factor) const {
  Field out = *this;
  for (double& v : out.values_) v *= factor;
  return out;
}

Field Field::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw ZeroField("cannot normalize the zero field");
  return scaled(1.0 / n);
}

bool Field::is_zero() const {
  for (const double v : values_) {
    if (v != 0.0) return false;
  }
  return true;
}

Field Field::on_mask(const DomainMask& larger) const { return Field(larger, values_); }

double dot(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("fields live on different grids");
  double s = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) s += va[i] * vb[i];
  return s * a.grid().cell_volume();
}

}  // namespace specpart
