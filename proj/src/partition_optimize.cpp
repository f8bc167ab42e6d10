#include <algorithm>
#include <cmath>
#include <random>

#include "specpart/errors.hpp"
#include "specpart/parallel.hpp"
#include "specpart/partition.hpp"

namespace specpart {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Context {
  const DomainMask& domain;
  std::vector<double> potential;
  int k;
  double p;
  const OptimizeOptions& opt;
};

struct Iterate {
  std::vector<DomainMask> cells;
  std::vector<Field> fields;
  std::vector<double> lambdas;
  double energy = 0.0;
};

std::vector<Eigenpair> ground_states(const Context& ctx, const std::vector<DomainMask>& masks,
                                     const std::vector<Field>* guesses) {
  std::vector<Eigenpair> out(masks.size());
  parallel_for(masks.size(), [&](std::size_t i) {
    const DiscreteForm form(masks[i], ctx.potential);
    out[i] = smallest_eigenpair(form, ctx.opt.eig_tol, guesses ? &(*guesses)[i] : nullptr);
  });
  return out;
}

Iterate solve(const Context& ctx, std::vector<DomainMask> cells, const std::vector<Field>* guesses) {
  Iterate it;
  const auto eig = ground_states(ctx, cells, guesses);
  it.cells = std::move(cells);
  for (const auto& e : eig) {
    it.fields.push_back(e.u);
    it.lambdas.push_back(e.lambda);
  }
  it.energy = p_norm(it.lambdas, ctx.p);
  return it;
}

// Releases, on every edge joining two labelled nodes of different cells,
// the node nearest the zero of score(i) - score(j) interpolated along the
// edge. Cells then never touch; touching cells would each see a Dirichlet
// wall one step inside the other and overlap by h.
template <class Score>
std::vector<DomainMask> separate(const GridSpec& g, const std::vector<std::size_t>& pts, const std::vector<int>& label,
                                 int k, Score score) {
  std::vector<std::uint8_t> released(g.size(), 0);
  std::vector<std::size_t> nb;
  for (const auto x : pts) {
    const int i = label[x];
    if (i < 0) continue;
    g.neighbours(x, nb);
    for (const auto y : nb) {
      if (y < x || label[y] < 0 || label[y] == i) continue;
      const int j = label[y];
      const double dx = score(i, x) - score(j, x);
      const double dy = score(j, y) - score(i, y);
      const double t = dx + dy > 0.0 ? dx / (dx + dy) : 0.5;
      released[t <= 0.5 ? x : y] = 1;
    }
  }
  std::vector<DomainMask> cells(k, DomainMask::empty(g));
  for (const auto idx : pts) {
    if (label[idx] >= 0 && !released[idx]) cells[label[idx]].set(idx, true);
  }
  return cells;
}

std::vector<DomainMask> voronoi_seed(const Context& ctx, std::uint64_t seed) {
  const auto pts = ctx.domain.points();
  if (pts.size() < static_cast<std::size_t>(ctx.k)) {
    throw ValidationError("domain has fewer interior points than cells");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> centers;
  std::sample(pts.begin(), pts.end(), std::back_inserter(centers), ctx.k, rng);
  std::shuffle(centers.begin(), centers.end(), rng);
  const GridSpec& g = ctx.domain.grid();
  auto dist2 = [&](int i, std::size_t idx) {
    const Point x = g.coords(idx), c = g.coords(centers[i]);
    return (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]);
  };
  std::vector<int> label(g.size(), -1);
  for (const auto idx : pts) {
    int best = 0;
    for (int i = 1; i < ctx.k; ++i) {
      if (dist2(i, idx) < dist2(best, idx)) best = i;
    }
    label[idx] = best;
  }
  auto cells = separate(g, pts, label, ctx.k, [&](int i, std::size_t idx) { return -std::sqrt(dist2(i, idx)); });
  for (int i = 0; i < ctx.k; ++i) {
    if (cells[i].is_empty()) cells[i].set(centers[i], true);
  }
  return cells;
}

// Weights a_i = (lambda_i / max lambda)^((p-1)/2).
std::vector<double> weights(const std::vector<double>& lambdas, double p) {
  const double m = *std::max_element(lambdas.begin(), lambdas.end());
  std::vector<double> a;
  for (const double l : lambdas) a.push_back(std::pow(l / m, 0.5 * (p - 1.0)));
  return a;
}

// New cells from the weighted argmax of the competing fields, each field
// being the ground state of its cell grown by `band` layers.
std::vector<DomainMask> reassign(const Context& ctx, const Iterate& cur, int band, int& reseeds) {
  const GridSpec& g = ctx.domain.grid();
  const int k = ctx.k;
  std::vector<DomainMask> grown;
  for (const auto& c : cur.cells) grown.push_back(c.dilate(band, ctx.domain));
  const auto comp = ground_states(ctx, grown, &cur.fields);
  const auto a = weights(cur.lambdas, ctx.p);

  const auto pts = ctx.domain.points();
  auto weighted = [&](int i, std::size_t idx) { return a[i] * comp[i].u[idx]; };
  double gmax = 0.0;
  for (const auto idx : pts) {
    for (int i = 0; i < k; ++i) gmax = std::max(gmax, weighted(i, idx));
  }
  const double floor = ctx.opt.drop_tol * gmax;

  std::vector<int> label(g.size(), -1);
  std::vector<double> lead(g.size(), 0.0);  // winner minus runner-up
  for (const auto idx : pts) {
    int best = -1;
    double bv = floor, second = 0.0;
    for (int i = 0; i < k; ++i) {
      const double v = weighted(i, idx);
      if (v > bv) {
        if (best >= 0) second = bv;
        best = i;
        bv = v;
      } else {
        second = std::max(second, v);
      }
    }
    label[idx] = best;
    if (best >= 0) lead[idx] = bv - second;
  }
  auto cells = separate(g, pts, label, k, weighted);

  std::vector<std::size_t> nb;
  for (int i = 0; i < k; ++i) {
    if (!cells[i].is_empty()) continue;
    if (++reseeds > ctx.opt.max_reseeds) throw CellCollapse(i + 1);
    // reseed where some other cell holds its most comfortable lead
    std::size_t best = pts.front();
    double bl = -1.0;
    for (const auto idx : pts) {
      if (label[idx] >= 0 && cells[label[idx]][idx] && lead[idx] > bl && cells[label[idx]].count() > 1) {
        bl = lead[idx];
        best = idx;
      }
    }
    if (bl < 0.0) throw CellCollapse(i + 1);
    cells[label[best]].set(best, false);
    cells[i].set(best, true);
    g.neighbours(best, nb);
    for (const auto y : nb) {
      if (label[y] >= 0 && label[y] != i && cells[label[y]][y] && cells[label[y]].count() > 1) {
        cells[label[y]].set(y, false);
        cells[i].set(y, true);
      }
    }
  }
  return cells;
}

// One-node interface moves. A released node m next to cells i and j goes
// to the cell with the larger a_i u_i at its neighbours (a discrete
// normal derivative), and the loser's nodes next to m are released.
// Released nodes touching a single cell always join it.
struct Move {
  std::size_t node;
  int cell;
  double priority;
};

std::vector<Move> interface_moves(const Context& ctx, const Iterate& cur) {
  const GridSpec& g = ctx.domain.grid();
  const auto a = weights(cur.lambdas, ctx.p);
  std::vector<int> label(g.size(), -1);
  for (int i = 0; i < ctx.k; ++i) {
    for (const auto idx : cur.cells[i].points()) label[idx] = i;
  }
  std::vector<Move> moves;
  std::vector<std::size_t> nb;
  std::vector<double> sigma(ctx.k);
  for (const auto m : ctx.domain.points()) {
    if (label[m] >= 0) continue;
    std::fill(sigma.begin(), sigma.end(), -1.0);
    g.neighbours(m, nb);
    for (const auto y : nb) {
      const int i = label[y];
      if (i >= 0) sigma[i] = std::max(sigma[i], a[i] * cur.fields[i][y]);
    }
    int best = -1;
    double bv = -1.0, second = -1.0;
    for (int i = 0; i < ctx.k; ++i) {
      if (sigma[i] > bv) {
        second = bv;
        bv = sigma[i];
        best = i;
      } else {
        second = std::max(second, sigma[i]);
      }
    }
    if (best < 0 || bv <= 0.0) continue;
    const double pr = second < 0.0 ? 1.0 : (bv - second) / bv;
    if (pr > 1e-12) moves.push_back({m, best, pr});
  }
  std::stable_sort(moves.begin(), moves.end(), [](const Move& x, const Move& y) { return x.priority > y.priority; });
  return moves;
}

// Applies the first `count` moves greedily; a move is skipped when it
// would touch a node joined by an earlier move of another cell or empty
// a cell.
std::vector<DomainMask> apply_moves(const Context& ctx, const Iterate& cur, const std::vector<Move>& moves,
                                    std::size_t count) {
  const GridSpec& g = ctx.domain.grid();
  std::vector<int> label(g.size(), -1), joined(g.size(), -1);
  std::vector<std::size_t> size(ctx.k);
  for (int i = 0; i < ctx.k; ++i) {
    for (const auto idx : cur.cells[i].points()) label[idx] = i;
    size[i] = cur.cells[i].count();
  }
  std::vector<std::size_t> nb;
  std::vector<std::size_t> lost(ctx.k);
  for (std::size_t t = 0; t < count && t < moves.size(); ++t) {
    const auto [m, i, pr] = moves[t];
    if (label[m] >= 0) continue;
    g.neighbours(m, nb);
    bool ok = true;
    std::fill(lost.begin(), lost.end(), 0);
    for (const auto y : nb) {
      if (label[y] < 0 || label[y] == i) continue;
      if (joined[y] >= 0) ok = false;
      ++lost[label[y]];
    }
    for (int j = 0; j < ctx.k && ok; ++j) ok = lost[j] < size[j];
    if (!ok) continue;
    for (const auto y : nb) {
      if (label[y] < 0 || label[y] == i) continue;
      --size[label[y]];
      label[y] = -1;
    }
    label[m] = i;
    joined[m] = i;
    ++size[i];
  }
  std::vector<DomainMask> cells(ctx.k, DomainMask::empty(g));
  for (const auto idx : ctx.domain.points()) {
    if (label[idx] >= 0) cells[label[idx]].set(idx, true);
  }
  return cells;
}

PartitionState to_state(const Context& ctx, const Iterate& it, int iteration, const std::vector<double>& history) {
  PartitionState s;
  s.k = ctx.k;
  s.p = ctx.p;
  s.cells = it.cells;
  s.fields = it.fields;
  s.lambdas = it.lambdas;
  s.iteration = iteration;
  s.history = history;
  return s;
}

struct RunResult {
  PartitionState state;
  int reseeds = 0;
};

RunResult run_single(const Context& ctx, std::vector<DomainMask> start) {
  const auto& opt = ctx.opt;
  RunResult rr;
  Iterate cur = solve(ctx, std::move(start), nullptr);
  std::vector<double> history{cur.energy};
  int accepted = 0;
  if (opt.observer) opt.observer(to_state(ctx, cur, accepted, history));

  // coarse phase: dilated competing fields; fine phase: one-node moves
  int band = std::max(2, opt.band);
  bool fine = false;
  bool converged = ctx.k == 1;
  auto accept = [&](Iterate&& next) {
    cur = std::move(next);
    history.push_back(cur.energy);
    ++accepted;
    if (opt.observer) opt.observer(to_state(ctx, cur, accepted, history));
    const std::size_t n = history.size();
    return n > static_cast<std::size_t>(opt.patience) &&
           history[n - 1 - opt.patience] - cur.energy <= opt.rel_tol * cur.energy;
  };
  std::size_t batch = 0;
  std::vector<Move> moves;
  for (int it = 0; it < opt.max_iter && !converged; ++it) {
    if (!fine) {
      auto cells = reassign(ctx, cur, band, rr.reseeds);
      bool shrink = cells == cur.cells;
      if (!shrink) {
        Iterate next = solve(ctx, std::move(cells), &cur.fields);
        // the energy never increases
        shrink = next.energy > cur.energy || accept(std::move(next));
      }
      if (shrink) {
        if (band == 2) fine = true;
        band = std::max(2, band / 2);
      }
      continue;
    }
    if (batch == 0) {
      moves = interface_moves(ctx, cur);
      batch = moves.size();
      if (batch == 0) {
        converged = true;
        continue;
      }
    }
    auto cells = apply_moves(ctx, cur, moves, batch);
    if (cells != cur.cells) {
      Iterate next = solve(ctx, std::move(cells), &cur.fields);
      if (next.energy < cur.energy) {
        if (accept(std::move(next))) converged = true;
        batch = 0;
        continue;
      }
    }
    batch /= 2;
    if (batch == 0) converged = true;
  }
  if (!converged) {
    const std::size_t n = history.size();
    const double rel = n > 1 ? (history[n - 2] - history[n - 1]) / history[n - 1] : 0.0;
    throw NoConvergence(opt.max_iter, rel);
  }
  rr.state = to_state(ctx, cur, accepted, history);
  rr.state.converged = true;
  return rr;
}

}  // namespace

OptimizeResult optimize(const DomainMask& domain, const Potential& V, int k, double p, const OptimizeOptions& opt) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (!(p >= 1.0) || std::isinf(p)) throw ValidationError("optimize needs 1 <= p < inf; use optimize_pinf for p = inf");
  if (domain.is_empty()) throw EmptyMask("partition domain is empty");
  if (opt.starts < 1) throw ValidationError("at least one start is needed");
  if (!opt.initial_cells.empty() && static_cast<int>(opt.initial_cells.size()) != k) {
    throw ValidationError("initial cells must number k");
  }
  const Context ctx{domain, V.sample(domain.grid()), k, p, opt};

  const bool seeded = !opt.initial_cells.empty();
  const int starts = (seeded || k == 1) ? 1 : opt.starts;
  std::vector<std::uint64_t> seeds(starts);
  std::uint64_t sm = opt.seed;
  for (auto& s : seeds) s = splitmix64(sm);

  std::vector<std::optional<RunResult>> runs(starts);
  std::vector<std::exception_ptr> errors(starts);
  parallel_for(starts, [&](std::size_t s) {
    try {
      std::vector<DomainMask> init;
      if (seeded) {
        for (const auto& c : opt.initial_cells) init.push_back(c & domain);
      } else if (k == 1) {
        init.push_back(domain);
      } else {
        init = voronoi_seed(ctx, seeds[s]);
      }
      runs[s] = run_single(ctx, std::move(init));
    } catch (const NumericalError&) {
      errors[s] = std::current_exception();
    }
  });

  int best = -1;
  for (int s = 0; s < starts; ++s) {
    if (runs[s] && (best < 0 || runs[s]->state.history.back() < runs[best]->state.history.back())) best = s;
  }
  if (best < 0) std::rethrow_exception(errors.front());

  OptimizeResult out;
  out.state = std::move(runs[best]->state);
  out.reseeds = runs[best]->reseeds;
  out.best_start = best;
  out.start_seed = seeds[best];
  out.report = make_report(out.state, DiscreteForm(domain, ctx.potential));
  return out;
}

std::vector<double> default_p_schedule() { return {2, 4, 8, 16, 32, 64}; }

PinfResult optimize_pinf(const DomainMask& domain, const Potential& V, int k, std::span<const double> schedule,
                         const OptimizeOptions& opt) {
  if (schedule.empty()) throw ValidationError("p schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] >= 1.0) || std::isinf(schedule[i]) || (i > 0 && !(schedule[i] > schedule[i - 1]))) {
      throw ValidationError("p schedule must be finite, >= 1 and increasing");
    }
  }
  PinfResult out;
  out.schedule.assign(schedule.begin(), schedule.end());
  OptimizeOptions stage = opt;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    out.result = optimize(domain, V, k, schedule[i], stage);
    out.stage_energy.push_back(out.result.state.history.back());
    out.stage_max.push_back(*std::max_element(out.result.state.lambdas.begin(), out.result.state.lambdas.end()));
    stage.initial_cells = out.result.state.cells;
  }
  PartitionState final_state = out.result.state;
  final_state.p = std::numeric_limits<double>::infinity();
  out.result.report = make_report(final_state, DiscreteForm(domain, V));
  return out;
}

}  // namespace specpart
