#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsecut/conic.hpp"
#include "sparsecut/cut.hpp"
#include "sparsecut/model.hpp"

namespace sparsecut {

/// Which lifted pairs (i, j), 1 <= i <= j <= n, receive envelope rows.
enum class McCormickMode { Off, E, Full };

const char* to_string(McCormickMode mode);
McCormickMode parse_mccormick_mode(const std::string& text);

/// x_coef_i * Y_0i + x_coef_j * Y_0j + xx_coef * Y_ij >= rhs.
struct EnvelopeRow {
  double x_coef_i = 0.0;
  double x_coef_j = 0.0;
  double xx_coef = 0.0;
  double rhs = 0.0;

  double evaluate(double xi, double xj, double xij) const { return x_coef_i * xi + x_coef_j * xj + xx_coef * xij - rhs; }
};

struct McCormickRow {
  int i = 0;
  int j = 0;
  /// Four rows for i != j, three for i == j (the two secants coincide).
  std::vector<EnvelopeRow> rows;
};

/// Envelope of Y_ij = x_i x_j on the box; i and j are lifted indices (>= 1),
/// bounds are indexed by variable (i - 1, j - 1).
McCormickRow mccormick_rows(int i, int j, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

struct ShorOptions {
  McCormickMode mccormick = McCormickMode::Off;
  /// Elementwise Y >= 0; requires a nonneg instance.
  bool dnn = false;
};

/// Shor relaxation over the full lifted matrix (space = full support).
ConicProblem build_shor_sdp(const QcqpInstance& instance, const ShorOptions& options = {});

/// LP over the coordinates of `space` (which must contain the instance's E):
/// Y_00 = 1, box on Y_0i, <Q^k, Y> <= 0, envelope rows and one row per cut.
/// `lower`/`upper` replace the instance box (used for branch-and-bound nodes).
ConicProblem build_lp(const QcqpInstance& instance, const SupportPtr& space, std::span<const Cut> cuts,
                      McCormickMode mccormick, const Eigen::VectorXd* lower = nullptr,
                      const Eigen::VectorXd* upper = nullptr);

/// build_lp over the instance's own support E.
ConicProblem build_e_lp(const QcqpInstance& instance, std::span<const Cut> cuts, McCormickMode mccormick);

/// The solution restricted to the problem's space coordinates.
EVector solution_point(const ConicProblem& problem, const SolveResult& result);

}  // namespace sparsecut
