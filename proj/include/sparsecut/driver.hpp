#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sparsecut/conic.hpp"
#include "sparsecut/cut.hpp"
#include "sparsecut/relaxation.hpp"
#include "sparsecut/separation.hpp"

namespace sparsecut {

enum class StrategyKind { DenseMcCPlusCuts, DenseCuts, SparseCuts, SdpPlusSparseCuts };

/// Cone used by the sparse strategies. Auto picks EDNN for nonneg instances.
enum class ConeMode { EPSD, EDNN, Auto };

const char* to_string(StrategyKind kind);
/// Short names: dense-mcc, dense, sparse, sdp-sparse.
const char* short_name(StrategyKind kind);
StrategyKind parse_strategy(const std::string& text);
const char* to_string(ConeMode mode);
ConeMode parse_cone_mode(const std::string& text);

inline constexpr StrategyKind kAllStrategies[] = {StrategyKind::DenseMcCPlusCuts, StrategyKind::DenseCuts,
                                                  StrategyKind::SparseCuts, StrategyKind::SdpPlusSparseCuts};

struct Strategy {
  StrategyKind kind = StrategyKind::SparseCuts;
  ConeMode cone = ConeMode::Auto;
  double alpha = 0.001;

  bool sparse() const { return kind == StrategyKind::SparseCuts || kind == StrategyKind::SdpPlusSparseCuts; }
};

/// Cut family a strategy actually uses on an instance (Dense, EPSD or EDNN).
CutMode effective_cut_mode(const Strategy& strategy, const QcqpInstance& instance);

struct DriverLimits {
  double time_limit = 60.0;
  int max_iters = 1000;
  /// Stop once GC reaches this value; +inf runs until no violated cut.
  double gc_target = 0.99;
};

/// False when z_sdp <= z_mcc + max(1e-9, 1e-7 |z_sdp|); the relative term
/// absorbs the accuracy of the two conic solves.
inline bool gap_is_defined(double z_mcc, double z_sdp) {
  return z_sdp > z_mcc + std::max(1e-9, 1e-7 * std::abs(z_sdp));
}

/// (z - z_mcc) / (z_sdp - z_mcc); throws a degenerate-gap error unless
/// gap_is_defined.
double gap_closed(double z, double z_mcc, double z_sdp);

struct ReferenceBounds {
  /// E-LP with McCormick rows on E and no cuts.
  double z_mcc = 0.0;
  /// Shor SDP (or DNN) with McCormick rows on E.
  double z_ref = 0.0;
  bool dnn = false;
  /// Optimal lifted matrix of the reference relaxation.
  SymMatrix y_ref;
  double t_mcc = 0.0;
  double t_ref = 0.0;
  /// See gap_is_defined.
  bool gap_defined = false;
};

ReferenceBounds compute_reference(const QcqpInstance& instance, bool dnn, const ConicBackend* backend = nullptr);

struct IterationRecord {
  int iter = 0;
  double z_lp = 0.0;
  /// NaN when the gap is degenerate.
  double gc = 0.0;
  int num_cuts = 0;
  int lp_columns = 0;
  double t_lp = 0.0;
  double t_separation = 0.0;
  /// Accelerated mode found nothing at the blended point and separated Z_LP.
  bool fallback = false;
  /// The LP solve met only the backend's relaxed accuracy.
  bool reduced_accuracy = false;
};

struct Trace {
  std::string instance;
  Strategy strategy;
  CutMode cut_mode = CutMode::EPSD;
  std::vector<IterationRecord> iterations;
  double z_mcc = 0.0;
  double z_ref = 0.0;
  double z_lp = 0.0;
  double final_gc = 0.0;
  double total_time = 0.0;
  /// Reference SDP time for the accelerated strategy, 0 otherwise.
  double t_sdp = 0.0;
  double t_lastlp = 0.0;
  int lp_columns = 0;
  int fallbacks = 0;
  int reduced_accuracy_solves = 0;
  /// gc_target, no_violated_cut, max_iters, time_limit or numerical.
  std::string status;
  std::vector<Cut> cuts;
  SupportPtr space;

  int separation_rounds() const { return iterations.empty() ? 0 : static_cast<int>(iterations.size()) - 1; }
};

/// Data handed to the per-iteration observer before separation.
struct IterationView {
  const IterationRecord& record;
  const EVector& z_lp;
  /// Blended point in the accelerated strategy, otherwise null.
  const EVector* z_alpha;
};

struct DriverOptions {
  SeparationOptions separation{};
  /// Dense eigenvalue threshold relative to ||Y||_2.
  double dense_tol = 1e-6;
  const ConicBackend* backend = nullptr;
  std::function<void(const IterationView&)> on_iteration;
};

Trace run_cutting_plane(const QcqpInstance& instance, const Strategy& strategy, const DriverLimits& limits = {},
                        const DriverOptions& options = {}, const ReferenceBounds* reference = nullptr);

/// Cuts whose slack at the LP optimum over `cuts` exceeds tol; the LP bound is
/// re-checked and the full list returned if dropping changes it by more than 1e-7.
std::vector<Cut> purge_slack_cuts(const QcqpInstance& instance, const std::vector<Cut>& cuts, double tol = 1e-6,
                                  const ConicBackend* backend = nullptr);

/// iter,cuts,GC,z_lp,t_lastlp,t_sep,t_SDP per LP solve.
void write_trace_csv(const Trace& trace, std::ostream& out);

}  // namespace sparsecut
