#include "sparsecut/global.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <queue>

#include "sparsecut/relaxation.hpp"

namespace sparsecut {

namespace {

using Clock = std::chrono::steady_clock;

// f restricted to x_i = t is a t^2 + b t + c.
struct Quad1d {
  double a = 0.0, b = 0.0, c = 0.0;
  double operator()(double t) const { return (a * t + b) * t + c; }
};

Quad1d restrict(const QuadraticForm& f, const Eigen::VectorXd& x, int i) {
  Quad1d q;
  q.b = f.c[i];
  for (const auto& t : f.Q) {
    if (t.i == i && t.j == i) q.a += t.value;
    else if (t.i == i) q.b += 2.0 * t.value * x[t.j];
    else if (t.j == i) q.b += 2.0 * t.value * x[t.i];
  }
  q.c = f.evaluate(x) - q(x[i]);
  return q;
}

void add_roots(const Quad1d& q, double lo, double hi, std::vector<double>& out) {
  auto keep = [&](double t) {
    if (std::isfinite(t) && t >= lo && t <= hi) out.push_back(t);
  };
  if (q.a == 0.0) {
    if (q.b != 0.0) keep(-q.c / q.b);
    return;
  }
  const double disc = q.b * q.b - 4.0 * q.a * q.c;
  if (disc < 0.0) return;
  // Numerically stable pair of roots.
  const double s = -0.5 * (q.b + std::copysign(std::sqrt(disc), q.b));
  if (s != 0.0) {
    keep(s / q.a);
    keep(q.c / s);
  } else {
    keep(0.0);
  }
}

double violation(const QcqpInstance& inst, const Eigen::VectorXd& x) {
  return inst.m() == 0 ? 0.0 : std::max(0.0, inst.max_violation(x));
}

// One exact pass over the coordinates. In restoration mode the target is the
// constraint violation, otherwise the objective over the feasible set.
bool coordinate_sweep(const QcqpInstance& inst, Eigen::VectorXd& x, bool restore) {
  bool moved = false;
  for (int i = 0; i < inst.n(); ++i) {
    const double lo = inst.lower()[i], hi = inst.upper()[i];
    std::vector<Quad1d> cons;
    for (int k = 1; k <= inst.m(); ++k) cons.push_back(restrict(inst.form(k), x, i));
    const Quad1d obj = restrict(inst.objective(), x, i);

    std::vector<double> cand{lo, hi, x[i]};
    auto stationary = [&](const Quad1d& q) {
      if (q.a > 0.0) {
        const double t = -q.b / (2.0 * q.a);
        if (t > lo && t < hi) cand.push_back(t);
      }
    };
    for (const auto& q : cons) {
      add_roots(q, lo, hi, cand);
      if (restore) stationary(q);
    }
    if (!restore) stationary(obj);

    auto worst = [&](double t) {
      double v = 0.0;
      for (const auto& q : cons) v = std::max(v, q(t));
      return v;
    };
    const double cur_v = worst(x[i]), cur_f = obj(x[i]);
    double best_t = x[i], best_v = cur_v, best_f = cur_f;
    for (double t : cand) {
      const double v = worst(t), f = obj(t);
      if (restore) {
        if (v < best_v - 1e-15 * (1.0 + std::abs(best_v))) best_t = t, best_v = v, best_f = f;
      } else if (v <= kFeasTol && f < best_f - 1e-14 * (1.0 + std::abs(best_f))) {
        best_t = t, best_v = v, best_f = f;
      }
    }
    if (best_t != x[i]) {
      x[i] = best_t;
      moved = true;
    }
  }
  return moved;
}

Eigen::VectorXd gradient(const QuadraticForm& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g = f.c;
  for (const auto& t : f.Q) {
    g[t.i] += 2.0 * t.value * x[t.j];
    if (t.i != t.j) g[t.j] += 2.0 * t.value * x[t.i];
  }
  return g;
}

// Newton's method on the KKT system of the current active set. Returns the
// end point even when it leaves the box; the caller checks feasibility.
std::optional<Eigen::VectorXd> kkt_newton_once(const QcqpInstance& inst, const Eigen::VectorXd& x0) {
  const int n = inst.n();
  std::vector<int> free_vars, active;
  for (int i = 0; i < n; ++i) {
    const double w = 1e-9 * std::max(1.0, inst.upper()[i] - inst.lower()[i]);
    if (x0[i] > inst.lower()[i] + w && x0[i] < inst.upper()[i] - w) free_vars.push_back(i);
  }
  for (int k = 1; k <= inst.m(); ++k)
    if (inst.form(k).evaluate(x0) >= -1e-7) active.push_back(k);
  const int nf = static_cast<int>(free_vars.size()), na = static_cast<int>(active.size());
  if (nf == 0 || na > nf) return std::nullopt;

  std::vector<Eigen::MatrixXd> hess;
  hess.push_back(2.0 * inst.objective().dense_Q(n));
  for (int k : active) hess.push_back(2.0 * inst.form(k).dense_Q(n));

  Eigen::VectorXd x = x0;
  // Least-squares multipliers from the stationarity condition.
  Eigen::MatrixXd jac(nf, na);
  Eigen::VectorXd g0(nf);
  auto fill = [&] {
    const Eigen::VectorXd full = gradient(inst.objective(), x);
    for (int a = 0; a < nf; ++a) g0[a] = full[free_vars[static_cast<std::size_t>(a)]];
    for (int c = 0; c < na; ++c) {
      const Eigen::VectorXd gk = gradient(inst.form(active[static_cast<std::size_t>(c)]), x);
      for (int a = 0; a < nf; ++a) jac(a, c) = gk[free_vars[static_cast<std::size_t>(a)]];
    }
  };
  fill();
  Eigen::VectorXd lambda = na ? Eigen::VectorXd(jac.colPivHouseholderQr().solve(-g0)) : Eigen::VectorXd();

  for (int it = 0; it < 30; ++it) {
    fill();
    Eigen::VectorXd res(nf + na);
    res.head(nf) = g0 + jac * lambda;
    for (int c = 0; c < na; ++c) res[nf + c] = inst.form(active[static_cast<std::size_t>(c)]).evaluate(x);
    const double scale = 1.0 + g0.cwiseAbs().maxCoeff();
    if (res.cwiseAbs().maxCoeff() <= 1e-13 * scale) break;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nf + na, nf + na);
    for (int a = 0; a < nf; ++a)
      for (int b = 0; b < nf; ++b) {
        const int ia = free_vars[static_cast<std::size_t>(a)], ib = free_vars[static_cast<std::size_t>(b)];
        double h = hess[0](ia, ib);
        for (int c = 0; c < na; ++c) h += lambda[c] * hess[static_cast<std::size_t>(c) + 1](ia, ib);
        kkt(a, b) = h;
      }
    kkt.block(0, nf, nf, na) = jac;
    kkt.block(nf, 0, na, nf) = jac.transpose();
    const Eigen::VectorXd step = kkt.fullPivLu().solve(-res);
    if (!step.allFinite()) return std::nullopt;
    for (int a = 0; a < nf; ++a) x[free_vars[static_cast<std::size_t>(a)]] += step[a];
    if (na) lambda += step.tail(na);
    if (step.cwiseAbs().maxCoeff() > 1e3 * (1.0 + x0.cwiseAbs().maxCoeff())) return std::nullopt;
  }
  return x;
}

// When the Newton point leaves the box, the first bound met on the segment
// toward it joins the active set and the system is re-solved from there.
std::optional<Eigen::VectorXd> kkt_newton(const QcqpInstance& inst, const Eigen::VectorXd& x0) {
  const auto& lo = inst.lower();
  const auto& hi = inst.upper();
  Eigen::VectorXd start = x0;
  for (int attempt = 0; attempt <= inst.n(); ++attempt) {
    const auto x = kkt_newton_once(inst, start);
    if (!x) return std::nullopt;
    double t = 1.0;
    int blocking = -1;
    for (int i = 0; i < inst.n(); ++i) {
      const double d = (*x)[i] - start[i];
      const double ti = d < 0 && (*x)[i] < lo[i] ? (lo[i] - start[i]) / d : d > 0 && (*x)[i] > hi[i] ? (hi[i] - start[i]) / d : 1.0;
      if (ti < t) t = ti, blocking = i;
    }
    if (blocking < 0) return violation(inst, *x) <= kFeasTol ? x : std::nullopt;
    const bool to_lower = (*x)[blocking] < lo[blocking];
    start += std::max(t, 0.0) * (*x - start);
    start = start.cwiseMax(lo).cwiseMin(hi);
    start[blocking] = to_lower ? lo[blocking] : hi[blocking];
  }
  return std::nullopt;
}

}  // namespace

std::optional<Eigen::VectorXd> polish(const QcqpInstance& inst, const Eigen::VectorXd& start) {
  Eigen::VectorXd x = start.cwiseMax(inst.lower()).cwiseMin(inst.upper());
  for (int sweep = 0; sweep < 50 && violation(inst, x) > kFeasTol; ++sweep)
    if (!coordinate_sweep(inst, x, true)) break;
  if (violation(inst, x) > kFeasTol) return std::nullopt;
  for (int round = 0; round < 8; ++round) {
    for (int sweep = 0; sweep < 200; ++sweep)
      if (!coordinate_sweep(inst, x, false)) break;
    const auto y = kkt_newton(inst, x);
    if (!y || !(inst.objective_value(*y) < inst.objective_value(x) - 1e-13 * (1.0 + std::abs(inst.objective_value(x)))))
      break;
    x = *y;
  }
  return x;
}

GridResult brute_force_grid(const QcqpInstance& inst, int resolution, int starts) {
  if (resolution < 2) throw Error(ErrorKind::InvalidArgument, "grid resolution must be at least 2");
  if (starts < 1) throw Error(ErrorKind::InvalidArgument, "at least one polish start is needed");
  const int n = inst.n();
  GridResult out;
  // Max-heap on objective holding the best `starts` feasible grid points.
  using Entry = std::pair<double, Eigen::VectorXd>;
  auto cmp = [](const Entry& a, const Entry& b) { return a.first < b.first; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> best(cmp);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd x(n);
  for (bool done = false; !done;) {
    for (int i = 0; i < n; ++i)
      x[i] = inst.lower()[i] + (inst.upper()[i] - inst.lower()[i]) * idx[static_cast<std::size_t>(i)] / (resolution - 1);
    if (violation(inst, x) <= kFeasTol) {
      const double f = inst.objective_value(x);
      if (static_cast<int>(best.size()) < starts) {
        best.emplace(f, x);
      } else if (f < best.top().first) {
        best.pop();
        best.emplace(f, x);
      }
    }
    int k = 0;
    while (k < n && ++idx[static_cast<std::size_t>(k)] == resolution) idx[static_cast<std::size_t>(k++)] = 0;
    done = k == n;
  }
  if (best.empty()) return out;
  out.found = true;
  for (; !best.empty(); best.pop()) {
    const auto& [f, g] = best.top();
    out.z_grid = std::min(out.z_grid, f);
    if (f < out.z) {
      out.z = f;
      out.x = g;
    }
    if (auto y = polish(inst, g); y && inst.objective_value(*y) < out.z) {
      out.x = *y;
      out.z = inst.objective_value(*y);
    }
  }
  return out;
}

GlobalResult solve_global(const QcqpInstance& inst, const std::vector<Cut>& cuts, const GlobalOptions& options) {
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  const auto e = build_support_set(inst);
  for (const auto& c : cuts)
    if (!c.coeffs.support() || !same_support(*c.coeffs.support(), *e))
      throw Error(ErrorKind::SupportMismatch, "branch-and-bound cuts must live on the instance support");
  const int n = inst.n();

  GlobalResult res;
  auto offer = [&](const Eigen::VectorXd& x) {
    const auto y = polish(inst, x);
    if (y && inst.objective_value(*y) < res.z_best) {
      res.z_best = inst.objective_value(*y);
      res.x_best = *y;
    }
  };
  offer(0.5 * (inst.lower() + inst.upper()));

  struct Open {
    NodeInfo node;
    Eigen::VectorXd x_hat;
    int branch_var = -1;
    double split = 0.0;
  };
  auto worse = [](const Open& a, const Open& b) {
    return a.node.bound != b.node.bound ? a.node.bound > b.node.bound : a.node.id > b.node.id;
  };
  std::priority_queue<Open, std::vector<Open>, decltype(worse)> queue(worse);
  long next_id = 0;
  bool numerical = false;
  // Smallest bound among nodes discarded because they were within eps of the incumbent.
  double pruned_bound = std::numeric_limits<double>::infinity();

  // Solves the node LP; returns false when the node is pruned.
  auto evaluate = [&](Open& o) {
    const auto lp = build_lp(inst, e, cuts, McCormickMode::E, &o.node.lower, &o.node.upper);
    const auto r = solve_conic(lp, {}, options.backend);
    ++res.nodes;
    if (r.status == SolveStatus::Infeasible) return false;
    if (!r.optimal()) {
      // The parent bound stays valid; bisect the widest variable and retry
      // on the children. Only an unsplittable box taints the result.
      int widest = -1;
      double width = 0.0;
      for (int i = 0; i < n; ++i) {
        const double w = o.node.upper[i] - o.node.lower[i];
        if (w > width && w > 1e-6 * std::max(1.0, inst.upper()[i] - inst.lower()[i])) {
          width = w;
          widest = i;
        }
      }
      if (o.node.parent < 0 || widest < 0) {
        numerical = true;
        return false;
      }
      res.trail.push_back(o.node);
      o.x_hat = (o.node.lower + o.node.upper) / 2;
      o.branch_var = widest;
      o.split = o.x_hat[widest];
      return true;
    }
    o.node.bound = o.node.parent < 0 ? r.objective : std::max(r.objective, o.node.bound);
    res.trail.push_back(o.node);
    const EVector z = solution_point(lp, r);
    Eigen::VectorXd xh(n);
    for (int i = 0; i < n; ++i) xh[i] = z.at(0, i + 1);
    o.x_hat = xh;
    offer(xh);
    // Branching score: |Z_ii - x_i^2| + max_j |Z_ij - x_i x_j| over E.
    double best = -1.0;
    for (int i = 1; i <= n; ++i) {
      const double w = o.node.upper[i - 1] - o.node.lower[i - 1];
      if (w <= 1e-9 * std::max(1.0, inst.upper()[i - 1] - inst.lower()[i - 1])) continue;
      double off = 0.0;
      for (int j = 1; j <= n; ++j)
        if (j != i && e->contains(i, j)) off = std::max(off, std::abs(z.at(i, j) - xh[i - 1] * xh[j - 1]));
      const double score = std::abs(z.at(i, i) - xh[i - 1] * xh[i - 1]) + off;
      if (score > best) {
        best = score;
        o.branch_var = i - 1;
      }
    }
    if (o.branch_var < 0 || best <= 1e-9) return false;  // rank-one on E: LP point is exact
    const int b = o.branch_var;
    const double lo = o.node.lower[b], hi = o.node.upper[b], w = hi - lo;
    o.split = std::clamp(xh[b], lo + 0.1 * w, hi - 0.1 * w);
    return true;
  };
  auto gap_of = [&](double bound) {
    return std::isfinite(res.z_best) ? (res.z_best - bound) / std::max(1.0, std::abs(res.z_best))
                                     : std::numeric_limits<double>::infinity();
  };

  Open root;
  root.node.id = next_id++;
  root.node.lower = inst.lower();
  root.node.upper = inst.upper();
  const bool root_open = evaluate(root);
  if (!res.trail.empty()) res.root_bound = res.trail.front().bound;
  if (root_open) queue.push(root);

  res.status = "optimal";
  while (!queue.empty()) {
    const double bound = queue.top().node.bound;
    if (gap_of(bound) <= options.eps_rel) break;
    if (res.nodes >= options.node_limit) {
      res.status = "node_limit";
      break;
    }
    if (elapsed() >= options.time_limit) {
      res.status = "time_limit";
      break;
    }
    Open parent = queue.top();
    queue.pop();
    for (int side = 0; side < 2; ++side) {
      Open child;
      child.node.id = next_id++;
      child.node.parent = parent.node.id;
      child.node.depth = parent.node.depth + 1;
      child.node.lower = parent.node.lower;
      child.node.upper = parent.node.upper;
      child.node.bound = parent.node.bound;
      (side == 0 ? child.node.upper : child.node.lower)[parent.branch_var] = parent.split;
      if (!evaluate(child)) continue;
      if (gap_of(child.node.bound) > options.eps_rel) queue.push(std::move(child));
      else pruned_bound = std::min(pruned_bound, child.node.bound);
    }
  }
  res.bound = std::min({res.z_best, pruned_bound, queue.empty() ? res.z_best : queue.top().node.bound});
  if (res.status == "optimal" && !std::isfinite(res.z_best)) res.status = "infeasible";
  if (numerical && (res.status == "optimal" || res.status == "infeasible")) res.status = "numerical";
  res.gap = gap_of(res.bound);
  res.time = elapsed();
  return res;
}

}  // namespace sparsecut
