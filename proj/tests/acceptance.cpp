// Acceptance checks 1-14. Each prints one line:
//   criterion N: PASS|FAIL  <measured values>
// Run all with no arguments or one with --criterion N; the exit status is
// non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specpart/errors.hpp"
#include "specpart/json_util.hpp"
#include "specpart/oracles.hpp"
#include "specpart/scenario.hpp"

using namespace specpart;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DomainMask rect_domain(Point lo, Point hi, double h, int dim = 2) {
  const auto g = GridSpec::window(dim, lo, hi, h);
  return build_mask(Region::rect(lo, hi), g);
}

double num(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : parse_scalar(j); }

std::vector<fs::path> shipped_configs() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(SPECPART_CONFIG_DIR)) {
    if (e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

json load(const fs::path& p) {
  std::ifstream is(p);
  return json::parse(is);
}

json run_example(const std::string& name, json params = json::object()) {
  params["name"] = name;
  return run(parse_config({{"mode", "example"}, {"example", params}, {"seed", {{"value", 1}}}}));
}

// ---------------------------------------------------------------------------

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto form = DiscreteForm(rect_domain({0, 0}, {pi, pi}, pi / 128), Potential::zero());
  const auto pairs = k_smallest(form, 3);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double ref[3] = {2, 5, 5};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(pairs[i].lambda - ref[i]));
  const bool ok = std::abs(pairs[0].lambda - 2.0) <= 1e-2 && worst <= 2e-2 && secs < 30.0;
  return {ok, fmt("lambda = %.6f %.6f %.6f, max error %.2e (tol 2e-2), |lambda1 - 2| = %.2e (tol 1e-2), %.2f s (< 30)",
                  pairs[0].lambda, pairs[1].lambda, pairs[2].lambda, worst, std::abs(pairs[0].lambda - 2.0), secs)};
}

Outcome c2() {
  const auto form = DiscreteForm(rect_domain({0, 0}, {30, 0}, 1.0 / 2000, 1), Potential::axial_step(1, 5));
  const double lam = smallest_eigenpair(form).lambda;
  const double root = oracles::transcendental_root(1, 5);
  const double err = std::abs(lam - root);
  return {err <= 1e-4, fmt("FD %.9f vs root %.9f, error %.2e (tol 1e-4)", lam, root, err)};
}

// The half-strip of the m = 2 example: (0, X) x (0, l pi), L = 1, c = 5.
struct HalfStrip {
  double ell, W, h;
  DomainMask mask;
  Potential V = Potential::axial_step(1, 5);
  oracles::HalfStripSpectrum oracle;
};

HalfStrip halfstrip(int ny = 32, double R = 75) {
  HalfStrip s;
  s.ell = oracles::halfstrip_ell_for(2, 1, 5);
  s.W = s.ell * pi;
  s.h = s.W / ny;
  const double X = s.h * std::ceil(R / s.h - 1e-9);
  s.mask = rect_domain({0, 0}, {X, s.W}, s.h);
  s.oracle = oracles::halfstrip_spectrum({s.ell, 1, 5}, 3);
  return s;
}

Outcome c3() {
  const auto s = halfstrip();
  const DiscreteForm form(s.mask, s.V);
  const int N = count_below(form, s.oracle.sigma - 1e-3);
  SweepOptions so;
  so.center = {0, s.W / 2};
  const double R = 75;
  const std::vector<double> radii{R / 8, R / 6, R / 4};
  const auto est = sigma_estimate(persson_sweep(s.mask, s.V, radii, so));
  const double exact = 5 + 1 / (s.ell * s.ell);
  const double err = std::abs(est.sigma - exact);
  return {N == 2 && err <= 1e-2,
          fmt("count_below(Sigma - 1e-3) = %d (want 2), sigma_estimate %.6f vs c + 1/l^2 = %.6f, error %.2e (tol 1e-2)",
              N, est.sigma, exact, err)};
}

Outcome c4() {
  bool ok = true;
  std::ostringstream os;
  int checked = 0;
  for (const auto& path : shipped_configs()) {
    const auto cfg = parse_config(load(path));
    const json rep = run(cfg);
    if (!rep.contains("threshold")) continue;
    const json& t = rep["threshold"];
    const double T = num(t["threshold"]), L = num(t["lambda_k"]), unc = num(t["sigma_uncertainty"]);
    const double slack = cfg.opt.eig_tol * std::max(1.0, std::isinf(T) ? 1.0 : T) + unc;
    const bool below = L <= T + slack;
    const bool upper = t["upper_bound_ok"].get<bool>();
    ok = ok && below && upper;
    ++checked;
    os << path.stem().string() << ": Lambda " << fmt("%.6f", L) << " <= T " << fmt("%.6f", T) << " + "
       << fmt("%.2e", slack) << (below ? " ok" : " VIOLATED") << (upper ? ", T <= k^(1/p) Sigma ok" : ", T > k^(1/p) Sigma")
       << "; ";
  }
  return {ok && checked > 0, fmt("%d scenarios; ", checked) + os.str()};
}

Outcome c5() {
  OptimizeOptions o;
  o.seed = 1;
  o.starts = 4;
  const auto r = optimize_pinf(rect_domain({0, 0}, {pi, pi}, pi / 48), Potential::zero(), 2, default_p_schedule(), o);
  const double L = r.result.report.strong, gap = r.result.report.gap;
  const bool ok = gap <= 1e-2 * L && std::abs(L - 5) <= 0.01 * 5;
  return {ok, fmt("schedule to p = %g: Lambda %.6f (within 1%% of 5: %s), gap %.2e (<= %.2e)", r.schedule.back(), L,
                  std::abs(L - 5) <= 0.05 ? "yes" : "no", gap, 1e-2 * L)};
}

Outcome c6() {
  const json rep = run_example("watermelon", {{"k", 3}, {"r", 1}, {"c", 20}, {"R", 8}});
  const json& ch = rep["checks"];
  const bool ok = ch["ball_below_c"].get<bool>() && ch["sectors_near_c"].get<bool>() && ch["gap_over_tol"].get<bool>();
  return {ok, fmt("ball lambda %.4f < c - margin = %.4f; sector max rel. deviation %.4f (<= 0.05); gap %.3f (> 10 tol)",
                  ch["ball_lambda"].get<double>(), 20 - ch["margin"].get<double>(),
                  ch["sector_rel_dev_max"].get<double>(), rep["summary"]["gap"].get<double>())};
}

Outcome c7() {
  const std::vector<double> Rs{8, 16, 32};
  const json sw = run_sweep({{"mode", "example"}, {"example", {{"name", "strip"}, {"k", 2}, {"p", "inf"}}}}, "R", Rs);
  std::vector<double> L;
  for (const auto& row : sw["rows"]) L.push_back(row["status"] == "ok" ? num(row["energy"]) : kInf);
  bool decreasing = true;
  for (std::size_t i = 1; i < L.size(); ++i) decreasing = decreasing && L[i] < L[i - 1];
  const double room = oracles::strip_room_energy(20);
  const bool a = decreasing && L.back() <= 1.1;
  const bool b = std::abs(room - 1.0) <= 1e-3;
  return {a && b, fmt("Lambda(R = 8, 16, 32) = %.6f %.6f %.6f strictly decreasing: %s, final <= 1.1: %s; "
                      "strip_room_energy(20) = %.7f, |. - 1| = %.2e (tol 1e-3)",
                      L[0], L[1], L[2], decreasing ? "yes" : "no", L.back() <= 1.1 ? "yes" : "no", room,
                      std::abs(room - 1.0))};
}

Outcome c8() {
  bool ok = true;
  int sweeps = 0, values = 0, ann = 0;
  double worst = 0.0;
  std::string bad;
  for (const auto& path : shipped_configs()) {
    const json rep = run(parse_config(load(path)));
    if (!rep.contains("sigma") || !rep["sigma"].contains("entries")) continue;
    ++sweeps;
    const auto& e = rep["sigma"]["entries"];
    for (std::size_t i = 1; i < e.size(); ++i, ++values) {
      const double drop = num(e[i - 1]["lambda"]) - num(e[i]["lambda"]);
      worst = std::max(worst, drop);
      if (drop > 1e-8) {
        ok = false;
        bad += path.stem().string() + " ";
      }
    }
    if (rep["sigma"].contains("annulus")) {
      const auto& a = rep["sigma"]["annulus"];
      for (std::size_t i = 1; i < a.size(); ++i, ++ann) {
        if (num(a[i]["lambda"]) > num(a[i - 1]["lambda"]) + 1e-8) {
          ok = false;
          bad += path.stem().string() + "(annulus) ";
        }
      }
    }
  }
  ok = ok && sweeps > 0 && ann > 0;
  return {ok, fmt("%d sweeps, %d ball steps, %d annulus steps; largest decrease in r %.2e (tol 1e-8)", sweeps, values,
                  ann, worst) +
                  (bad.empty() ? "" : "; violations: " + bad)};
}

Region random_piece(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 4.0), rad(0.5, 1.8);
  if (rng() % 2 == 0) {
    const double x0 = u(rng), x1 = u(rng), y0 = u(rng), y1 = u(rng);
    return Region::rect({std::min(x0, x1), std::min(y0, y1)}, {std::max(x0, x1) + 0.3, std::max(y0, y1) + 0.3});
  }
  return Region::ball({u(rng), u(rng)}, rad(rng));
}

Outcome c9() {
  std::mt19937_64 rng(2024);
  const auto g = GridSpec::window(2, {0, 0}, {4, 4}, 0.2);
  int pairs = 0, violations = 0;
  double worst = -kInf;
  while (pairs < 200) {
    Region outer = random_piece(rng);
    for (int n = rng() % 3; n > 0; --n) outer = outer | random_piece(rng);
    const Region inner = outer & random_piece(rng);
    const auto m2 = build_mask_allow_empty(outer, g);
    const auto m1 = build_mask_allow_empty(inner, g);
    if (m1.is_empty()) continue;
    const Potential V = pairs % 2 ? Potential::harmonic() : Potential::zero();
    const double l1 = smallest_eigenpair(DiscreteForm(m1, V)).lambda;
    const double l2 = smallest_eigenpair(DiscreteForm(m2, V)).lambda;
    worst = std::max(worst, l2 - l1);
    if (!(l1 >= l2 - 1e-9) || !m1.subset_of(m2)) ++violations;
    ++pairs;
  }
  return {violations == 0, fmt("%d nested pairs, %d violations, max lambda(outer) - lambda(inner) = %.2e (tol 1e-9)",
                               pairs, violations, worst)};
}

Outcome c10() {
  const double h = 0.1;
  const auto form = DiscreteForm(rect_domain({-9, -9}, {9, 9}, h), Potential::zero());
  const auto& g = form.mask().grid();
  bool ok = true;
  std::string detail;
  for (int trial = 0; trial < 3; ++trial) {
    double res[2], bound[2];
    for (int s = 0; s < 2; ++s) {
      const double n = 2.0 * (s + 1);
      std::mt19937_64 rng(100 + trial);
      std::uniform_real_distribution<double> noise(0.5, 1.5);
      Field u(form.mask());
      for (const auto p : form.mask().points()) {
        const Point x = g.coords(p);
        const double rho = std::hypot(x[0], x[1]) / n;
        u.set(p, std::exp(-rho * rho) * noise(rng));
      }
      const auto d = ims_decompose(form, u.normalized(), n);
      res[s] = d.residual;
      bound[s] = d.bound;
    }
    const double ratio = res[0] / res[1];
    const bool t = ratio >= 3 && ratio <= 5 && res[0] <= bound[0] && res[1] <= bound[1];
    ok = ok && t;
    detail += fmt("trial %d: residual n=2 %.4f (<= %.3f), n=4 %.4f (<= %.3f), ratio %.3f in [3,5]; ", trial, res[0],
                  bound[0], res[1], bound[1], ratio);
  }
  return {ok, detail};
}

Outcome c11() {
  const auto dom = rect_domain({0, 0}, {pi, pi}, pi / 16);
  int runs = 0, bad_history = 0, bad_disjoint = 0, bad_norm = 0, observed = 0;
  double worst_norm = 0.0;
  for (int s = 1; s <= 50; ++s) {
    OptimizeOptions o;
    o.seed = static_cast<std::uint64_t>(s);
    o.starts = 1;
    const int k = 2 + s % 2;
    const double p = s % 4 < 2 ? 1.0 : 2.0;
    o.observer = [&](const PartitionState& st) {
      ++observed;
      for (int i = 0; i < st.k; ++i) {
        const double e = std::abs(st.fields[i].norm() - 1.0);
        worst_norm = std::max(worst_norm, e);
        if (e > 1e-10) ++bad_norm;
        for (const auto q : st.fields[i].mask().points()) {
          if (st.fields[i][q] != 0.0 && !st.cells[i][q]) ++bad_disjoint;
        }
        for (int j = i + 1; j < st.k; ++j) {
          if (!disjoint(st.cells[i], st.cells[j])) ++bad_disjoint;
        }
      }
      for (std::size_t i = 1; i < st.history.size(); ++i) {
        if (st.history[i] > st.history[i - 1]) ++bad_history;
      }
    };
    optimize(dom, Potential::zero(), k, p, o);
    ++runs;
  }
  const bool ok = runs == 50 && bad_history == 0 && bad_disjoint == 0 && bad_norm == 0;
  return {ok, fmt("%d runs, %d observed iterates; history increases %d, support violations %d, "
                  "max |norm - 1| %.2e (tol 1e-10)",
                  runs, observed, bad_history, bad_disjoint, worst_norm)};
}

double energy(const DomainMask& dom, const Potential& V, int k, double p) {
  OptimizeOptions o;
  o.seed = 1;
  o.starts = 4;
  if (std::isinf(p)) return optimize_pinf(dom, V, k, default_p_schedule(), o).result.report.strong;
  return optimize(dom, V, k, p, o).report.strong;
}

Outcome c12() {
  constexpr double tol = 1e-2;
  bool ok = true;
  std::string detail;
  const auto series = [&](const char* name, const DomainMask& dom, const Potential& V) {
    const std::vector<double> ps{1, 2, 4, kInf};
    std::vector<double> byp, byk;
    for (const double p : ps) byp.push_back(energy(dom, V, 2, p));
    for (int k = 1; k <= 3; ++k) byk.push_back(energy(dom, V, k, kInf));
    bool pin = true, kin = true;
    for (std::size_t i = 1; i < byp.size(); ++i) pin = pin && byp[i] <= byp[i - 1] + tol;
    for (std::size_t i = 1; i < byk.size(); ++i) kin = kin && byk[i] >= byk[i - 1] - tol;
    ok = ok && pin && kin;
    detail += fmt("%s: Lambda_{2,p} (p = 1,2,4,inf) = %.4f %.4f %.4f %.4f non-increasing: %s; "
                  "Lambda_{k,inf} (k = 1,2,3) = %.4f %.4f %.4f non-decreasing: %s; ",
                  name, byp[0], byp[1], byp[2], byp[3], pin ? "yes" : "no", byk[0], byk[1], byk[2],
                  kin ? "yes" : "no");
  };
  series("square", rect_domain({0, 0}, {pi, pi}, pi / 32), Potential::zero());
  const auto hs = halfstrip(16, 40);
  series("half-strip", hs.mask, hs.V);
  return {ok, detail + "tolerance 1e-2"};
}

Outcome c13() {
  const json rep = run_example("halfstrip", {{"m", 2}});
  const json& cb = rep["counts"];
  const int N = cb["N"].get<int>();
  const int Ninf = cb["partition_counts"][0]["count"].get<int>();
  return {Ninf <= N && cb["pass"].get<bool>(),
          fmt("c = Sigma - 1e-3 = %.6f: partition count %d <= N(c) = %d", num(cb["c"]), Ninf, N)};
}

Outcome c14() {
  double r[2];
  bool converged = true;
  for (int s = 0; s < 2; ++s) {
    const int n = 256 << s;
    const auto dom = rect_domain({0, 0}, {pi, 0}, pi / n, 1);
    OptimizeOptions o;
    o.seed = 1;
    o.starts = 2;
    const auto res = optimize(dom, Potential::zero(), 2, 2.0, o);
    converged = converged && res.state.converged && res.report.gap <= 1e-8;
    r[s] = check_differential_inequalities(res.state, DiscreteForm(dom, Potential::zero())).max_l1;
  }
  const double ratio = r[0] / r[1];
  const bool ok = converged && r[1] <= 5e-2 && ratio >= 3 && ratio <= 5;
  return {ok, fmt("equipartition reached: %s; residual at h = pi/256 %.3e, at h = pi/512 %.3e (<= 5e-2); "
                  "ratio %.3f (target 4, accepted [3,5])",
                  converged ? "yes" : "no", r[0], r[1], ratio)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> checks{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) which.push_back(std::atoi(argv[++i]));
  }
  if (which.empty()) {
    for (int i = 1; i <= static_cast<int>(checks.size()); ++i) which.push_back(i);
  }
  int failed = 0;
  for (const int c : which) {
    if (c < 1 || c > static_cast<int>(checks.size())) {
      std::printf("criterion %d: FAIL  no such criterion\n", c);
      ++failed;
      continue;
    }
    Outcome o;
    try {
      o = checks[c - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
