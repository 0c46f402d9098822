#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>

#include "sparsecut/conic.hpp"

namespace sparsecut {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalError: return "numerical_error";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

void ConicProblem::validate() const {
  if (num_vars < 0 || objective.size() != num_vars)
    throw Error(ErrorKind::DimensionMismatch, "objective length differs from variable count");
  if ((lower.size() != 0 && lower.size() != num_vars) || (upper.size() != 0 && upper.size() != num_vars))
    throw Error(ErrorKind::DimensionMismatch, "bound vectors must be empty or match the variable count");
  if (space && space->size() > static_cast<std::size_t>(num_vars))
    throw Error(ErrorKind::DimensionMismatch, "support larger than the variable space");
  for (const auto& row : rows)
    for (const auto& [var, coeff] : row.coeffs)
      if (var < 0 || var >= num_vars) throw Error(ErrorKind::DimensionMismatch, "row references undeclared coordinate");
  for (const auto& block : psd_blocks) {
    if (block.dim < 1) throw Error(ErrorKind::InvalidArgument, "empty PSD block");
    for (const auto& t : block.terms) {
      if (t.row < 0 || t.col < 0 || t.row >= block.dim || t.col >= block.dim)
        throw Error(ErrorKind::DimensionMismatch, "PSD term outside its block");
      if (t.var < -1 || t.var >= num_vars) throw Error(ErrorKind::DimensionMismatch, "PSD term references undeclared coordinate");
    }
  }
}

double ConicProblem::max_row_violation(const Eigen::VectorXd& y) const {
  double worst = 0.0;
  for (const auto& row : rows) {
    double lhs = 0.0;
    for (const auto& [var, coeff] : row.coeffs) lhs += coeff * y[var];
    switch (row.sense) {
      case Sense::Ge: worst = std::max(worst, row.rhs - lhs); break;
      case Sense::Le: worst = std::max(worst, lhs - row.rhs); break;
      case Sense::Eq: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  for (int k = 0; k < num_vars; ++k) {
    if (lower.size()) worst = std::max(worst, lower[k] - y[k]);
    if (upper.size()) worst = std::max(worst, y[k] - upper[k]);
  }
  return worst;
}

StandardForm to_standard_form(const ConicProblem& problem) {
  problem.validate();
  const int n = problem.num_vars;
  StandardForm sf;
  sf.c = problem.objective;
  sf.offset = problem.objective_offset;

  std::vector<Eigen::VectorXd> eq_rows, lin_rows;
  std::vector<double> eq_rhs, lin_rhs;
  for (const auto& row : problem.rows) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const auto& [var, coeff] : row.coeffs) a[var] += coeff;
    switch (row.sense) {
      case Sense::Eq:
        sf.row_map.emplace_back(-static_cast<int>(eq_rows.size()) - 1, -1.0);
        eq_rows.push_back(a);
        eq_rhs.push_back(row.rhs);
        break;
      case Sense::Ge:
        sf.row_map.emplace_back(static_cast<int>(lin_rows.size()), 1.0);
        lin_rows.push_back(-a);
        lin_rhs.push_back(-row.rhs);
        break;
      case Sense::Le:
        sf.row_map.emplace_back(static_cast<int>(lin_rows.size()), -1.0);
        lin_rows.push_back(a);
        lin_rhs.push_back(row.rhs);
        break;
    }
  }
  for (int k = 0; k < n; ++k) {
    if (problem.lower.size() && std::isfinite(problem.lower[k])) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a[k] = -1.0;
      lin_rows.push_back(a);
      lin_rhs.push_back(-problem.lower[k]);
    }
    if (problem.upper.size() && std::isfinite(problem.upper[k])) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a[k] = 1.0;
      lin_rows.push_back(a);
      lin_rhs.push_back(problem.upper[k]);
    }
  }
  sf.A.resize(static_cast<Eigen::Index>(eq_rows.size()), n);
  sf.b.resize(static_cast<Eigen::Index>(eq_rows.size()));
  for (std::size_t r = 0; r < eq_rows.size(); ++r) {
    sf.A.row(static_cast<Eigen::Index>(r)) = eq_rows[r].transpose();
    sf.b[static_cast<Eigen::Index>(r)] = eq_rhs[r];
  }
  sf.G_lin.resize(static_cast<Eigen::Index>(lin_rows.size()), n);
  sf.h_lin.resize(static_cast<Eigen::Index>(lin_rows.size()));
  for (std::size_t r = 0; r < lin_rows.size(); ++r) {
    sf.G_lin.row(static_cast<Eigen::Index>(r)) = lin_rows[r].transpose();
    sf.h_lin[static_cast<Eigen::Index>(r)] = lin_rhs[r];
  }
  // s = M(y) = F0 + sum y_k F_k  =>  h = vec(F0), G_k = -vec(F_k).
  for (const auto& block : problem.psd_blocks) {
    const int d = block.dim;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d * d, n);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(d * d);
    for (const auto& t : block.terms) {
      const int a = t.row * d + t.col;  // column-major index of (col, row)
      const int b = t.col * d + t.row;
      if (t.var < 0) {
        h[a] += t.coeff;
        if (a != b) h[b] += t.coeff;
      } else {
        G(a, t.var) -= t.coeff;
        if (a != b) G(b, t.var) -= t.coeff;
      }
    }
    sf.psd_dims.push_back(d);
    sf.G_psd.push_back(std::move(G));
    sf.h_psd.push_back(std::move(h));
  }
  return sf;
}

// ---------------------------------------------------------------------------
// Backend registry

namespace {

struct Registry {
  std::mutex mutex;
  std::map<std::string, BackendFactory> factories;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_backend(const std::string& name, BackendFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.factories[name] = std::move(factory);
}

BackendPtr make_backend(const std::string& name) {
  if (name == "ipm" || name.empty()) return native_backend();
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.factories.find(name);
  if (it == r.factories.end()) throw Error(ErrorKind::InvalidArgument, "unknown backend '" + name + "'");
  return it->second();
}

std::vector<std::string> backend_names() {
  std::vector<std::string> names{"ipm"};
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  for (const auto& [name, f] : r.factories) names.push_back(name);
  return names;
}

SolveResult solve_conic(const ConicProblem& problem, const SolveLimits& limits, const ConicBackend* backend) {
  const ConicBackend& b = backend ? *backend : *native_backend();
  return b.solve(problem, limits);
}

// ---------------------------------------------------------------------------
// SDPA export

void write_sdpa(const ConicProblem& problem, std::ostream& out) {
  problem.validate();
  // SDPA dual form: max b^T y  s.t.  sum_k F_k y_k - F_0 >= 0. We minimize
  // c^T y, so b = -c. Block 1 is the diagonal LP block (if any).
  struct Entry {
    int var, block, row, col;
    double value;
  };
  std::vector<Entry> entries;
  int lp_rows = 0;
  auto add_lp_row = [&](const std::vector<std::pair<int, double>>& coeffs, double sign, double rhs) {
    ++lp_rows;
    for (const auto& [var, coeff] : coeffs) entries.push_back({var + 1, 1, lp_rows, lp_rows, sign * coeff});
    if (rhs != 0.0) entries.push_back({0, 1, lp_rows, lp_rows, sign * rhs});
  };
  for (const auto& row : problem.rows) {
    if (row.sense != Sense::Le) add_lp_row(row.coeffs, 1.0, row.rhs);
    if (row.sense != Sense::Ge) add_lp_row(row.coeffs, -1.0, row.rhs);
  }
  for (int k = 0; k < problem.num_vars; ++k) {
    if (problem.lower.size() && std::isfinite(problem.lower[k])) add_lp_row({{k, 1.0}}, 1.0, problem.lower[k]);
    if (problem.upper.size() && std::isfinite(problem.upper[k])) add_lp_row({{k, 1.0}}, -1.0, problem.upper[k]);
  }
  const int first_psd = lp_rows > 0 ? 2 : 1;
  for (std::size_t b = 0; b < problem.psd_blocks.size(); ++b) {
    for (const auto& t : problem.psd_blocks[b].terms) {
      const int r = std::min(t.row, t.col) + 1, c = std::max(t.row, t.col) + 1;
      // F_0 enters with a minus sign in SDPA's dual form.
      entries.push_back({t.var + 1, first_psd + static_cast<int>(b), r, c, t.var < 0 ? -t.coeff : t.coeff});
    }
  }
  const int nblocks = (lp_rows > 0 ? 1 : 0) + static_cast<int>(problem.psd_blocks.size());
  out << "* sparsecut conic problem, objective offset " << problem.objective_offset << "\n";
  out << problem.num_vars << "\n" << nblocks << "\n";
  if (lp_rows > 0) out << -lp_rows << " ";
  for (const auto& block : problem.psd_blocks) out << block.dim << " ";
  out << "\n";
  out.precision(17);
  for (int k = 0; k < problem.num_vars; ++k) out << -problem.objective[k] << (k + 1 < problem.num_vars ? " " : "\n");
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.var, a.block, a.row, a.col) < std::tie(b.var, b.block, b.row, b.col);
  });
  for (const auto& e : entries)
    out << e.var << " " << e.block << " " << e.row << " " << e.col << " " << e.value << "\n";
}

// ---------------------------------------------------------------------------
// Eigen-decomposition and PSD completion

std::vector<EigenPair> eigendecomp(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Numerical, "eigendecomposition failed");
  std::vector<EigenPair> out;
  for (Eigen::Index k = m.rows() - 1; k >= 0; --k) out.push_back({es.eigenvalues()[k], es.eigenvectors().col(k)});
  return out;
}

std::vector<EigenPair> eigendecomp(const SymMatrix& m) { return eigendecomp(m.to_dense()); }

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

CompletionResult complete_to_psd_detail(const EVector& z, const ConicBackend* backend, const SolveLimits& limits) {
  const auto& support = *z.support();
  const int d = support.dim();
  // Variables: one per off-support pair, then the shift s.
  std::vector<Pair> free_pairs;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (!support.contains(i, j)) free_pairs.push_back({i, j});
  const int nfree = static_cast<int>(free_pairs.size());

  ConicProblem prob;
  prob.num_vars = nfree + 1;
  prob.objective = Eigen::VectorXd::Zero(prob.num_vars);
  prob.objective[nfree] = 1.0;
  PsdBlock block;
  block.dim = d;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto [i, j] = support.pair(k);
    const double v = z.values()[static_cast<Eigen::Index>(k)];
    if (v != 0.0) block.terms.push_back({i, j, -1, v});
  }
  for (int k = 0; k < nfree; ++k) block.terms.push_back({free_pairs[k].i, free_pairs[k].j, k, 1.0});
  for (int i = 0; i < d; ++i) block.terms.push_back({i, i, nfree, 1.0});
  prob.psd_blocks.push_back(std::move(block));

  const SolveResult res = solve_conic(prob, limits, backend);
  CompletionResult out;
  out.status = res.status;
  if (!res.optimal()) throw Error(ErrorKind::Numerical, std::string("completion SDP failed: ") + res.message);
  out.shift = res.primal[nfree];
  if (out.shift <= 1e-8) {
    SymMatrix y = embed_from_E(z);
    for (int k = 0; k < nfree; ++k) y(free_pairs[k].i, free_pairs[k].j) = res.primal[k];
    out.completion = std::move(y);
  }
  return out;
}

std::optional<SymMatrix> complete_to_psd(const EVector& z, const ConicBackend* backend) {
  return complete_to_psd_detail(z, backend).completion;
}

}  // namespace sparsecut
