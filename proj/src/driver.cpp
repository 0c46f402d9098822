#include "sparsecut/driver.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace sparsecut {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Dense LPs with envelopes only on E leave the other Y_ij bounded by cuts
// alone, and the near-recession directions cost the LP solver ~1e-7 in the
// objective. |Y_ij| <= M_i M_j follows from Y psd and the diagonal envelopes,
// so the limit bound is unchanged.
void bound_free_coordinates(const QcqpInstance& instance, const SupportSet& e, ConicProblem& lp) {
  const auto& space = *lp.space;
  for (std::size_t k = 0; k < space.size(); ++k) {
    const auto [i, j] = space.pair(k);
    if (e.contains(i, j)) continue;
    const double mi = std::max(std::abs(instance.lower()[i - 1]), std::abs(instance.upper()[i - 1]));
    const double mj = std::max(std::abs(instance.lower()[j - 1]), std::abs(instance.upper()[j - 1]));
    lp.lower[static_cast<Eigen::Index>(k)] = std::max(lp.lower[static_cast<Eigen::Index>(k)], -mi * mj);
    lp.upper[static_cast<Eigen::Index>(k)] = std::min(lp.upper[static_cast<Eigen::Index>(k)], mi * mj);
  }
}

}  // namespace

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::DenseMcCPlusCuts: return "Dense McC.+Cuts";
    case StrategyKind::DenseCuts: return "Dense Cuts";
    case StrategyKind::SparseCuts: return "Sparse Cuts";
    case StrategyKind::SdpPlusSparseCuts: return "SDP+Sparse Cuts";
  }
  return "?";
}

const char* short_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::DenseMcCPlusCuts: return "dense-mcc";
    case StrategyKind::DenseCuts: return "dense";
    case StrategyKind::SparseCuts: return "sparse";
    case StrategyKind::SdpPlusSparseCuts: return "sdp-sparse";
  }
  return "?";
}

StrategyKind parse_strategy(const std::string& text) {
  for (auto k : kAllStrategies)
    if (text == short_name(k) || text == to_string(k)) return k;
  throw Error(ErrorKind::InvalidArgument,
              "unknown strategy '" + text + "' (expected dense-mcc, dense, sparse or sdp-sparse)");
}

const char* to_string(ConeMode mode) {
  switch (mode) {
    case ConeMode::EPSD: return "epsd";
    case ConeMode::EDNN: return "ednn";
    case ConeMode::Auto: return "auto";
  }
  return "?";
}

ConeMode parse_cone_mode(const std::string& text) {
  if (text == "epsd") return ConeMode::EPSD;
  if (text == "ednn") return ConeMode::EDNN;
  if (text == "auto") return ConeMode::Auto;
  throw Error(ErrorKind::InvalidArgument, "unknown cone '" + text + "' (expected epsd, ednn or auto)");
}

CutMode effective_cut_mode(const Strategy& strategy, const QcqpInstance& instance) {
  if (!strategy.sparse()) return CutMode::Dense;
  switch (strategy.cone) {
    case ConeMode::EPSD: return CutMode::EPSD;
    case ConeMode::EDNN:
      if (!instance.nonneg()) throw Error(ErrorKind::ModeViolation, "EDNN cuts need an instance with x >= 0");
      return CutMode::EDNN;
    case ConeMode::Auto: return instance.nonneg() ? CutMode::EDNN : CutMode::EPSD;
  }
  return CutMode::EPSD;
}

double gap_closed(double z, double z_mcc, double z_sdp) {
  if (!gap_is_defined(z_mcc, z_sdp))
    throw Error(ErrorKind::DegenerateGap, fmt::format("SDP bound {} does not exceed McCormick bound {}", z_sdp, z_mcc));
  return (z - z_mcc) / (z_sdp - z_mcc);
}

ReferenceBounds compute_reference(const QcqpInstance& instance, bool dnn, const ConicBackend* backend) {
  ReferenceBounds ref;
  ref.dnn = dnn;
  const auto lp = build_e_lp(instance, {}, McCormickMode::E);
  const auto rl = solve_conic(lp, {}, backend);
  if (!rl.optimal()) throw Error(ErrorKind::Numerical, std::string("McCormick LP: ") + to_string(rl.status));
  ref.z_mcc = rl.objective;
  ref.t_mcc = rl.solve_time;
  const auto sdp = build_shor_sdp(instance, {.mccormick = McCormickMode::E, .dnn = dnn});
  const auto rs = solve_conic(sdp, {}, backend);
  if (!rs.optimal())
    throw Error(ErrorKind::Numerical, std::string(dnn ? "DNN" : "SDP") + " relaxation: " + to_string(rs.status));
  ref.z_ref = rs.objective;
  ref.t_ref = rs.solve_time;
  ref.y_ref = embed_from_E(solution_point(sdp, rs));
  ref.gap_defined = gap_is_defined(ref.z_mcc, ref.z_ref);
  return ref;
}

Trace run_cutting_plane(const QcqpInstance& instance, const Strategy& strategy, const DriverLimits& limits,
                        const DriverOptions& options, const ReferenceBounds* reference) {
  const auto start = Clock::now();
  Trace trace;
  trace.instance = instance.name();
  trace.strategy = strategy;
  trace.cut_mode = effective_cut_mode(strategy, instance);
  const bool dnn = trace.cut_mode == CutMode::EDNN;
  const bool accelerated = strategy.kind == StrategyKind::SdpPlusSparseCuts;
  if (accelerated && !(strategy.alpha > 0.0 && strategy.alpha < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");

  ReferenceBounds local;
  if (!reference) {
    local = compute_reference(instance, dnn, options.backend);
    reference = &local;
  } else if (reference->dnn != dnn) {
    throw Error(ErrorKind::InvalidArgument, "reference bounds were computed for a different cone");
  }
  trace.z_mcc = reference->z_mcc;
  trace.z_ref = reference->z_ref;
  if (accelerated) trace.t_sdp = reference->t_ref;

  const auto e = build_support_set(instance);
  trace.space = strategy.sparse() ? e : std::make_shared<const SupportSet>(SupportSet::full(instance.n() + 1));
  const McCormickMode mcc = strategy.kind == StrategyKind::DenseMcCPlusCuts ? McCormickMode::Full : McCormickMode::E;
  EVector y_ref_e;
  if (accelerated) y_ref_e = project_to_E(reference->y_ref, trace.space);

  auto gc_of = [&](double z) {
    return reference->gap_defined ? gap_closed(z, reference->z_mcc, reference->z_ref)
                                  : std::numeric_limits<double>::quiet_NaN();
  };
  auto separate_at = [&](const EVector& point, double tol) {
    SeparationOptions so = options.separation;
    so.tol_violation = tol;
    if (!so.backend) so.backend = options.backend;
    return dnn ? separate_ednn(point, instance.nonneg(), so) : separate_epsd(point, so);
  };

  for (int iter = 0;; ++iter) {
    auto lp = build_lp(instance, trace.space, trace.cuts, mcc);
    if (!strategy.sparse() && mcc == McCormickMode::E) bound_free_coordinates(instance, *e, lp);
    if (strategy.sparse() && (lp.num_vars != static_cast<int>(e->size()) || !same_support(*lp.space, *e)))
      throw Error(ErrorKind::SupportMismatch, "sparse strategy LP left the support E");
    SolveLimits sl;
    sl.time_limit = std::max(0.0, limits.time_limit - seconds_since(start));
    sl.gap_tol = 1e-12;
    sl.feasibility_tol = 1e-10;
    sl.max_iterations = 400;
    const auto r = solve_conic(lp, sl, options.backend);
    if (!r.optimal()) {
      trace.status = r.status == SolveStatus::TimeLimit ? "time_limit" : "numerical";
      break;
    }
    IterationRecord rec;
    rec.iter = iter;
    rec.z_lp = r.objective;
    rec.gc = gc_of(r.objective);
    rec.num_cuts = static_cast<int>(trace.cuts.size());
    rec.lp_columns = lp.num_vars;
    rec.t_lp = r.solve_time;
    rec.reduced_accuracy = r.reduced_accuracy;
    trace.reduced_accuracy_solves += r.reduced_accuracy;
    trace.z_lp = rec.z_lp;
    trace.final_gc = rec.gc;
    trace.t_lastlp = rec.t_lp;
    trace.lp_columns = lp.num_vars;

    const EVector z = solution_point(lp, r);
    std::optional<EVector> z_alpha;
    if (accelerated) z_alpha = blend_point(z, y_ref_e, strategy.alpha);
    if (options.on_iteration) options.on_iteration({rec, z, z_alpha ? &*z_alpha : nullptr});

    const auto stop = [&](const char* why) {
      trace.iterations.push_back(rec);
      trace.status = why;
    };
    if (std::isfinite(rec.gc) && rec.gc >= limits.gc_target) {
      stop("gc_target");
      break;
    }
    if (iter >= limits.max_iters) {
      stop("max_iters");
      break;
    }
    if (seconds_since(start) >= limits.time_limit) {
      stop("time_limit");
      break;
    }

    const auto sep_start = Clock::now();
    std::vector<Cut> fresh;
    try {
      if (!strategy.sparse()) {
        fresh = dense_eigen_cuts(embed_from_E(z), options.dense_tol, trace.space);
      } else {
        const double tol = options.separation.tol_violation;
        // A cut violated by alpha*t at the blended point is violated by at
        // least t at Z_LP, since the SDP optimum satisfies every valid cut.
        auto sep = accelerated ? separate_at(*z_alpha, strategy.alpha * tol) : separate_at(z, tol);
        if (accelerated && !sep.violated()) {
          rec.fallback = true;
          ++trace.fallbacks;
          sep = separate_at(z, tol);
        }
        if (sep.cut) fresh.push_back(std::move(*sep.cut));
      }
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::Numerical) throw;
      rec.t_separation = seconds_since(sep_start);
      stop("numerical");
      break;
    }
    rec.t_separation = seconds_since(sep_start);
    trace.iterations.push_back(rec);
    if (fresh.empty()) {
      trace.status = "no_violated_cut";
      break;
    }
    for (auto& c : fresh) trace.cuts.push_back(std::move(c));
  }
  trace.total_time = seconds_since(start);
  return trace;
}

std::vector<Cut> purge_slack_cuts(const QcqpInstance& instance, const std::vector<Cut>& cuts, double tol,
                                  const ConicBackend* backend) {
  if (cuts.empty()) return {};
  const auto space = cuts.front().coeffs.support();
  const auto full = build_lp(instance, space, cuts, McCormickMode::E);
  const auto r = solve_conic(full, {}, backend);
  if (!r.optimal()) return cuts;
  const EVector z = solution_point(full, r);
  std::vector<Cut> kept;
  for (const auto& c : cuts)
    if (c.evaluate(z) <= tol) kept.push_back(c);
  if (kept.size() == cuts.size()) return cuts;
  const auto rk = solve_conic(build_lp(instance, space, kept, McCormickMode::E), {}, backend);
  if (!rk.optimal() || std::abs(rk.objective - r.objective) > 1e-7 * std::max(1.0, std::abs(r.objective))) return cuts;
  return kept;
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << "iter,cuts,GC,z_lp,t_lastlp,t_sep,t_SDP\n";
  for (const auto& r : trace.iterations)
    fmt::print(out, "{},{},{:.10g},{:.12g},{:.6f},{:.6f},{:.6f}\n", r.iter, r.num_cuts, r.gc, r.z_lp, r.t_lp,
               r.t_separation, trace.t_sdp);
}

}  // namespace sparsecut
