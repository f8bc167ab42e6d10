#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "specpart/errors.hpp"
#include "specpart/partition.hpp"

using namespace specpart;
constexpr double pi = std::numbers::pi;

namespace {

GridSpec square_grid(int n) { return GridSpec::window(2, {0, 0}, {pi, pi}, pi / n); }

DomainMask square(const GridSpec& g) { return build_mask(Region::rect({0, 0}, {pi, pi}), g); }

DomainMask interval(int n) {
  const auto g = GridSpec::window(1, {0, 0}, {pi, 0}, pi / n);
  return build_mask(Region::rect({0, 0}, {pi, 0}), g);
}

std::vector<DomainMask> halves(const GridSpec& g) {
  return {build_mask(Region::rect({0, 0}, {pi / 2, pi}), g), build_mask(Region::rect({pi / 2, 0}, {pi, pi}), g)};
}

PartitionState state_of(const std::vector<DomainMask>& cells, const Potential& V, double p) {
  PartitionState s;
  s.k = static_cast<int>(cells.size());
  s.p = p;
  s.cells = cells;
  for (const auto& c : cells) {
    const auto e = smallest_eigenpair(DiscreteForm(c, V));
    s.fields.push_back(e.u);
    s.lambdas.push_back(e.lambda);
  }
  s.history = {p_norm(s.lambdas, p)};
  s.converged = true;
  return s;
}

}  // namespace

TEST_CASE("p_norm") {
  const std::vector<double> v{3.0, 4.0};
  CHECK(p_norm(v, 1.0) == doctest::Approx(7.0));
  CHECK(p_norm(v, 2.0) == doctest::Approx(5.0));
  CHECK(p_norm(v, INFINITY) == 4.0);
  // no overflow at large p
  const std::vector<double> big{1e10, 1e10};
  CHECK(p_norm(big, 64.0) == doctest::Approx(1e10 * std::pow(2.0, 1.0 / 64)));
}

TEST_CASE("energy_strong on the half-square split") {
  const auto g = square_grid(64);
  const auto cells = halves(g);
  const auto inf = energy_strong(cells, Potential::zero(), INFINITY);
  CHECK(std::abs(inf.strong - 5.0) < 2e-2);
  CHECK(inf.gap < 1e-9);
  const auto one = energy_strong(cells, Potential::zero(), 1.0);
  CHECK(std::abs(one.strong - 10.0) < 4e-2);

  const std::vector<DomainMask> whole{square(g)};
  for (const double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
    CHECK(std::abs(energy_strong(whole, Potential::zero(), p).strong - 2.0) < 1e-2);
  }

  const std::vector<DomainMask> overlap{square(g), cells[0]};
  CHECK_THROWS_AS(energy_strong(overlap, Potential::zero(), 1.0), OverlappingCells);
  const std::vector<DomainMask> empty{cells[0], DomainMask::empty(g)};
  CHECK_THROWS_AS(energy_strong(empty, Potential::zero(), 1.0), EmptyMask);
}

TEST_CASE("energy_relaxed") {
  const auto g = square_grid(32);
  const auto base = DiscreteForm(square(g), Potential::zero());
  auto s = state_of(halves(g), Potential::zero(), 2.0);
  const double strong = energy_strong(s.cells, Potential::zero(), 2.0).strong;
  CHECK(energy_relaxed(s, base) == doctest::Approx(strong).epsilon(1e-10));
  s.fields[0] = s.fields[0].scaled(2.0);
  CHECK(energy_relaxed(s, base) == doctest::Approx(strong).epsilon(1e-10));

  const auto one = state_of({square(g)}, Potential::zero(), 1.0);
  CHECK(energy_relaxed(one, base) == doctest::Approx(one.lambdas[0]).epsilon(1e-10));

  s.fields[1] = Field(s.cells[1]);
  CHECK_THROWS_AS(energy_relaxed(s, base), ZeroField);

  const auto rep = make_report(one, base, 3.0);
  CHECK(rep.relaxed >= rep.strong - 1e-9);
  REQUIRE(rep.ground_state.size() == 1u);
  CHECK(rep.ground_state[0]);
  const auto j = to_json(rep);
  CHECK(j.at("energy_strong").get<double>() == rep.strong);
}

TEST_CASE("optimize: square k=2 p=1 reaches the half split") {
  const auto g = square_grid(32);
  OptimizeOptions opt;
  opt.starts = 4;
  opt.seed = 1;
  std::vector<double> seen;
  opt.observer = [&](const PartitionState& s) {
    seen.push_back(s.history.back());
    for (int i = 0; i < s.k; ++i) {
      CHECK(std::abs(s.fields[i].norm() - 1.0) < 1e-10);
      for (int j = i + 1; j < s.k; ++j) CHECK(disjoint(s.cells[i], s.cells[j]));
    }
  };
  const auto r = optimize(square(g), Potential::zero(), 2, 1.0, opt);
  CHECK(r.state.converged);
  CHECK(std::abs(r.report.strong - 10.0) < 0.1);
  const auto& hist = r.state.history;
  for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] <= hist[i - 1]);
  CHECK_FALSE(seen.empty());
}

TEST_CASE("optimize: k=1 is the ground state") {
  const auto g = square_grid(24);
  const auto dom = square(g);
  const auto r = optimize(dom, Potential::zero(), 1, 2.0);
  const double l = smallest_eigenpair(DiscreteForm(dom, Potential::zero())).lambda;
  CHECK(r.report.strong == doctest::Approx(l).epsilon(1e-10));
  CHECK(r.state.cells[0] == dom);
}

TEST_CASE("optimize: argument validation") {
  const auto dom = interval(16);
  CHECK_THROWS_AS(optimize(dom, Potential::zero(), 0, 1.0), ValidationError);
  CHECK_THROWS_AS(optimize(dom, Potential::zero(), 2, INFINITY), ValidationError);
  CHECK_THROWS_AS(optimize(dom, Potential::zero(), 2, 0.5), ValidationError);
  const std::vector<double> bad{4, 2};
  CHECK_THROWS_AS(optimize_pinf(dom, Potential::zero(), 2, bad), ValidationError);
}

TEST_CASE("optimize_pinf: interval k=2 splits at the midpoint") {
  const int n = 256;
  const auto dom = interval(n);
  OptimizeOptions opt;
  opt.starts = 2;
  const auto sched = default_p_schedule();
  const auto r = optimize_pinf(dom, Potential::zero(), 2, sched, opt);
  CHECK(std::abs(r.result.report.strong - 4.0) < 1e-3);
  CHECK(r.result.report.gap < 1e-8);
  for (const auto& c : r.result.state.cells) CHECK(c.count() == static_cast<std::size_t>(n / 2 - 1));
  // stage energies never increase along the schedule
  for (std::size_t i = 1; i < r.stage_energy.size(); ++i) CHECK(r.stage_energy[i] <= r.stage_energy[i - 1] + 1e-9);
}

TEST_CASE("optimize_pinf: square k=2 is an equipartition") {
  const auto g = square_grid(32);
  OptimizeOptions opt;
  opt.starts = 2;
  const auto sched = default_p_schedule();
  const auto r = optimize_pinf(square(g), Potential::zero(), 2, sched, opt);
  const double L = r.result.report.strong;
  CHECK(std::abs(L - 5.0) < 5e-2);
  CHECK(r.result.report.gap <= 1e-2 * L);
}

TEST_CASE("ring partition on the V = 0 plane") {
  const auto g = GridSpec::window(2, {-45, -45}, {45, 45}, 0.75);
  const auto dom = build_mask(Region::rect({-45, -45}, {45, 45}), g);
  const auto rp = build_ring_partition(dom, Potential::zero(), 3, 0.05, 0.0);
  REQUIRE(rp.cells.size() == 3u);
  CHECK(rp.certified);
  for (const double l : rp.cell_lambdas) CHECK(l <= 0.05);
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) CHECK(disjoint(rp.cells[i], rp.cells[j]));
  }
  for (std::size_t j = 1; j < rp.radii.size(); ++j) CHECK(rp.radii[j].first > rp.radii[j - 1].second);

  const auto small = GridSpec::window(2, {-10, -10}, {10, 10}, 0.5);
  CHECK_THROWS_AS(build_ring_partition(build_mask(Region::rect({-10, -10}, {10, 10}), small), Potential::zero(), 3,
                                       0.05, 0.0),
                  WindowTooSmall);
  CHECK_THROWS_AS(build_ring_partition(dom, Potential::zero(), 3, 0.05, INFINITY), ValidationError);
}

TEST_CASE("ring partition on the step half-line") {
  const auto g = GridSpec::window(1, {0, 0}, {40, 0}, 0.05);
  const auto dom = build_mask(Region::rect({0, 0}, {40, 0}), g);
  const auto rp = build_ring_partition(dom, Potential::axial_step(1.0, 5.0), 2, 0.1, 5.0);
  CHECK(rp.certified);
  for (const double l : rp.cell_lambdas) CHECK(l <= 5.1);
}

TEST_CASE("smooth_step") {
  CHECK(smooth_step(-1.0) == 0.0);
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double s = smooth_step(i / 100.0);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("IMS decomposition") {
  const auto g = GridSpec::window(2, {-9, -9}, {9, 9}, 0.1);
  const auto form = DiscreteForm(build_mask(Region::rect({-9, -9}, {9, 9}), g), Potential::zero());

  Field inside(form.mask());
  for (const auto p : form.mask().points()) {
    const Point x = g.coords(p);
    if (std::hypot(x[0], x[1]) < 1.5) inside.set(p, 1.0);
  }
  const auto a = ims_decompose(form, inside, 2.0);
  CHECK(a.outer.norm() == 0.0);
  CHECK(a.residual < 1e-9 * form.energy(inside));

  Field outside(form.mask());
  for (const auto p : form.mask().points()) {
    const Point x = g.coords(p);
    if (std::hypot(x[0], x[1]) > 4.5) outside.set(p, 1.0);
  }
  const auto b = ims_decompose(form, outside, 2.0);
  CHECK(b.inner.norm() < 1e-12);
  CHECK(b.residual < 1e-9 * form.energy(outside));

  CHECK_THROWS_AS(ims_decompose(form, inside, 5.0), WindowTooSmall);

  // random fields dilated with the cutoff scale
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> noise(0.5, 1.5);
  for (int t = 0; t < 3; ++t) {
    double res[2];
    for (int s = 0; s < 2; ++s) {
      const double n = 2.0 * (s + 1);
      Field u(form.mask());
      for (const auto p : form.mask().points()) {
        const Point x = g.coords(p);
        const double rho = std::hypot(x[0], x[1]) / n;
        u.set(p, std::exp(-rho * rho) * noise(rng));
      }
      u = u.scaled(1.0 / u.norm());
      const auto d = ims_decompose(form, u, n);
      CHECK(d.residual <= d.bound);
      res[s] = d.residual;
    }
    const double ratio = res[0] / res[1];
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
  }
}

TEST_CASE("differential inequalities on the 1-D equipartition") {
  const int n = 512;
  const auto dom = interval(n);
  const auto g = dom.grid();
  const std::vector<DomainMask> cells{build_mask(Region::rect({0, 0}, {pi / 2, 0}), g),
                                      build_mask(Region::rect({pi / 2, 0}, {pi, 0}), g)};
  for (const double p : {1.0, 4.0}) {
    const auto s = state_of(cells, Potential::zero(), p);
    const auto rep = check_differential_inequalities(s, DiscreteForm(dom, Potential::zero()));
    CHECK(rep.max_l1 <= 5e-2);
    CHECK(rep.weights.size() == 2u);
    CHECK(rep.weights[0] == doctest::Approx(1.0));
  }

  // the optimizer reaches the same state
  OptimizeOptions opt;
  opt.starts = 2;
  const auto r = optimize(dom, Potential::zero(), 2, 2.0, opt);
  const auto rep = check_differential_inequalities(r.state, DiscreteForm(dom, Potential::zero()));
  CHECK(rep.max_l1 <= 5e-2);

  auto bad = state_of(cells, Potential::zero(), 1.0);
  bad.converged = false;
  CHECK_THROWS_AS(check_differential_inequalities(bad, DiscreteForm(dom, Potential::zero())), NotConverged);
  auto overlap = state_of({dom, cells[0]}, Potential::zero(), 1.0);
  CHECK_THROWS_AS(check_differential_inequalities(overlap, DiscreteForm(dom, Potential::zero())), OverlappingCells);
}
