#pragma once

#include <optional>
#include <vector>

#include "sparsecut/conic.hpp"
#include "sparsecut/cut.hpp"

namespace sparsecut {

struct SeparationOptions {
  /// A cut is returned only when the normalized objective is below -tol_violation.
  double tol_violation = 1e-6;
  const ConicBackend* backend = nullptr;
  SolveLimits limits{};
};

struct SeparationResult {
  /// Optimal value <C_E, Z> of the separation problem (recomputed from C).
  double objective = 0.0;
  /// Present iff objective < -tol_violation.
  std::optional<Cut> cut;
  SolveStatus status = SolveStatus::NumericalError;
  double solve_time = 0.0;

  bool violated() const { return cut.has_value(); }
};

/// One cut v v^T per eigenvalue below -tol * ||Y||_2, on `space` (full support
/// of Y's dimension when null).
std::vector<Cut> dense_eigen_cuts(const SymMatrix& y, double tol = 1e-6, SupportPtr space = nullptr);

/// min <C_E, Z> s.t. C psd, C = 0 off E, trace(C) <= 1.
SeparationResult separate_epsd(const EVector& z, const SeparationOptions& options = {});

/// min <C_E, Z> s.t. C psd, C <= 0 off E, trace(C) <= 1. Throws a mode
/// violation unless the instance is nonneg.
SeparationResult separate_ednn(const EVector& z, bool instance_nonneg, const SeparationOptions& options = {});

/// The unreduced form min <A_E, Z> s.t. A >= C, C psd, A = 0 off E,
/// trace(A) <= 1. Returns the optimal value.
double ednn_two_matrix_value(const EVector& z, const SeparationOptions& options = {});

/// alpha * z_lp + (1 - alpha) * y_sdp, coordinatewise; alpha in (0, 1).
EVector blend_point(const EVector& z_lp, const EVector& y_sdp, double alpha = 0.001);

}  // namespace sparsecut
