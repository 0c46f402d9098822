#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sparsecut/conic.hpp"
#include "sparsecut/cut.hpp"
#include "sparsecut/model.hpp"

namespace sparsecut {

/// Feasibility tolerance on max_k f_k(x) used by incumbents, polish and the grid.
inline constexpr double kFeasTol = 1e-9;

/// Local improvement of a point: restoration (if infeasible), exact coordinate
/// descent and active-set Newton steps on the KKT system. Returns a feasible
/// point with objective no worse than the start, or nullopt if none was found.
std::optional<Eigen::VectorXd> polish(const QcqpInstance& instance, const Eigen::VectorXd& start);

struct GridResult {
  bool found = false;
  double z = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;
  /// Best grid value before polishing.
  double z_grid = std::numeric_limits<double>::infinity();
};

/// Best feasible point of the uniform grid (resolution points per axis),
/// refined by polishing the `starts` best grid points. `found == false` is
/// not a proof of infeasibility.
GridResult brute_force_grid(const QcqpInstance& instance, int resolution, int starts = 256);

struct GlobalOptions {
  double eps_rel = 1e-4;
  long node_limit = 100000;
  double time_limit = 600.0;
  const ConicBackend* backend = nullptr;
};

struct NodeInfo {
  long id = 0;
  long parent = -1;
  int depth = 0;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double bound = 0.0;
};

struct GlobalResult {
  /// optimal, infeasible, node_limit, time_limit or numerical.
  std::string status;
  double z_best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x_best;
  double bound = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  long nodes = 0;
  double root_bound = -std::numeric_limits<double>::infinity();
  double time = 0.0;
  /// Every processed node with its LP bound (kept for property checks).
  std::vector<NodeInfo> trail;
};

/// Spatial branch-and-bound with McCormick-on-E node LPs plus the given cuts
/// (which must live on the instance's support E).
GlobalResult solve_global(const QcqpInstance& instance, const std::vector<Cut>& cuts, const GlobalOptions& options = {});

}  // namespace sparsecut
