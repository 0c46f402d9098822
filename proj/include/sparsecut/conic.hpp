#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsecut/model.hpp"

namespace sparsecut {

enum class Sense { Le, Eq, Ge };

struct LinearRow {
  std::vector<std::pair<int, double>> coeffs;
  Sense sense = Sense::Ge;
  double rhs = 0.0;
};

/// One term of an affine symmetric matrix function. `var == -1` marks a
/// constant term. An off-diagonal term (row != col) sets both mirrored cells.
struct PsdTerm {
  int row = 0;
  int col = 0;
  int var = -1;
  double coeff = 0.0;
};

/// The constraint M(y) = sum of terms >= 0 in the semidefinite order.
struct PsdBlock {
  int dim = 0;
  std::vector<PsdTerm> terms;
};

/// Backend-neutral conic program over free coordinates y:
///   min objective^T y + offset
///   s.t. linear rows, lower <= y <= upper, every PSD block M(y) >= 0.
struct ConicProblem {
  int num_vars = 0;
  Eigen::VectorXd objective;
  double objective_offset = 0.0;
  std::vector<LinearRow> rows;
  std::vector<PsdBlock> psd_blocks;
  /// Empty means unbounded; entries may be +-infinity.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  /// When set, coordinates [0, space->size()) are the E-vector coordinates of
  /// this support; further coordinates are auxiliary.
  SupportPtr space;

  void validate() const;
  /// Largest violation of any linear row or bound at y.
  double max_row_violation(const Eigen::VectorXd& y) const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NumericalError, TimeLimit };

const char* to_string(SolveStatus status);

struct SolveLimits {
  double time_limit = std::numeric_limits<double>::infinity();
  double feasibility_tol = 1e-9;
  double gap_tol = 1e-9;
  int max_iterations = 200;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalError;
  double objective = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd primal;
  /// One multiplier per linear row (>= 0 for Ge/Le rows in the Lagrangian sense).
  Eigen::VectorXd dual;
  /// Dual matrix for each PSD block.
  std::vector<Eigen::MatrixXd> psd_duals;
  double solve_time = 0.0;
  int iterations = 0;
  std::string message;
  /// Optimal status accepted from a stalled run (residuals <= 1e-6, not the requested tolerances).
  bool reduced_accuracy = false;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

class ConicBackend {
 public:
  virtual ~ConicBackend() = default;
  virtual std::string name() const = 0;
  virtual SolveResult solve(const ConicProblem& problem, const SolveLimits& limits) const = 0;
};

using BackendPtr = std::shared_ptr<const ConicBackend>;
using BackendFactory = std::function<BackendPtr()>;

/// The in-tree homogeneous self-dual interior-point method.
BackendPtr native_backend();
/// Looks a backend up by name ("ipm" is always registered).
BackendPtr make_backend(const std::string& name);
void register_backend(const std::string& name, BackendFactory factory);
std::vector<std::string> backend_names();

SolveResult solve_conic(const ConicProblem& problem, const SolveLimits& limits = {},
                        const ConicBackend* backend = nullptr);

/// Dense data of the standard form min c^T y s.t. A y = b, G y + s = h,
/// s in R+^l x S^{d_1} x ... (PSD parts in column-major full-matrix layout).
struct StandardForm {
  Eigen::VectorXd c;
  double offset = 0.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G_lin;
  Eigen::VectorXd h_lin;
  std::vector<int> psd_dims;
  /// Per block: (dim*dim) x num_vars matrix with vec(G_k) columns; h as vec.
  std::vector<Eigen::MatrixXd> G_psd;
  std::vector<Eigen::VectorXd> h_psd;
  /// For each linear row of the source problem: index into A (Eq) or G_lin,
  /// and the sign mapping the standard-form multiplier to the row multiplier.
  std::vector<std::pair<int, double>> row_map;
};

StandardForm to_standard_form(const ConicProblem& problem);

/// Writes the problem in SDPA sparse format (dual form, equalities as two
/// inequalities, LP rows as one diagonal block).
void write_sdpa(const ConicProblem& problem, std::ostream& out);

// ---------------------------------------------------------------------------
// Dense linear algebra helpers

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

/// Full spectrum of a symmetric matrix, eigenvalues in descending order.
std::vector<EigenPair> eigendecomp(const SymMatrix& m);
std::vector<EigenPair> eigendecomp(const Eigen::MatrixXd& m);
double min_eigenvalue(const Eigen::MatrixXd& m);

struct CompletionResult {
  /// Optimal value of min s s.t. Y + sI >= 0, Y_E = Z.
  double shift = 0.0;
  std::optional<SymMatrix> completion;
  SolveStatus status = SolveStatus::NumericalError;
};

/// PSD completion of an E-vector (exists iff the optimal shift <= 1e-8).
CompletionResult complete_to_psd_detail(const EVector& z, const ConicBackend* backend = nullptr,
                                        const SolveLimits& limits = {});
std::optional<SymMatrix> complete_to_psd(const EVector& z, const ConicBackend* backend = nullptr);

}  // namespace sparsecut
