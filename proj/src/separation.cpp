#include "sparsecut/separation.hpp"

namespace sparsecut {

std::vector<Cut> dense_eigen_cuts(const SymMatrix& y, double tol, SupportPtr space) {
  if (!space) space = std::make_shared<const SupportSet>(SupportSet::full(y.dim()));
  if (space->dim() != y.dim() || space->size() != static_cast<std::size_t>(y.dim()) * (y.dim() + 1) / 2)
    throw Error(ErrorKind::SupportMismatch, "dense cuts need the full support of the matrix dimension");
  const auto spectrum = eigendecomp(y);
  double norm = 0.0;
  for (const auto& ep : spectrum) norm = std::max(norm, std::abs(ep.value));
  std::vector<Cut> cuts;
  for (const auto& ep : spectrum) {
    if (ep.value >= -tol * norm) continue;
    Cut cut;
    cut.mode = CutMode::Dense;
    cut.eigenvector = ep.vector;
    cut.violation = ep.value;
    cut.coeffs = project_to_E(Eigen::MatrixXd(ep.vector * ep.vector.transpose()), space);
    cuts.push_back(std::move(cut));
  }
  return cuts;
}

namespace {

// C is parametrized by its E coordinates [0, |E|) followed, in DNN mode, by one
// coordinate per pair outside E (bounded above by zero).
SeparationResult separate(const EVector& z, bool dnn, const SeparationOptions& options) {
  const auto& e = *z.support();
  const int dim = e.dim();
  const int ne = static_cast<int>(e.size());
  std::vector<Pair> outside;
  if (dnn)
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        if (!e.contains(i, j)) outside.push_back({i, j});
  const int nv = ne + static_cast<int>(outside.size());

  ConicProblem p;
  p.num_vars = nv;
  p.objective = Eigen::VectorXd::Zero(nv);
  for (int k = 0; k < ne; ++k) p.objective[k] = e.weight(static_cast<std::size_t>(k)) * z.values()[k];
  p.lower = Eigen::VectorXd::Constant(nv, -std::numeric_limits<double>::infinity());
  p.upper = Eigen::VectorXd::Constant(nv, std::numeric_limits<double>::infinity());
  LinearRow trace{{}, Sense::Le, 1.0};
  PsdBlock block;
  block.dim = dim;
  for (int k = 0; k < ne; ++k) {
    const auto [i, j] = e.pair(static_cast<std::size_t>(k));
    block.terms.push_back({i, j, k, 1.0});
    if (i == j) trace.coeffs.emplace_back(k, 1.0);
  }
  for (std::size_t t = 0; t < outside.size(); ++t) {
    const int k = ne + static_cast<int>(t);
    block.terms.push_back({outside[t].i, outside[t].j, k, 1.0});
    p.upper[k] = 0.0;
  }
  p.rows.push_back(std::move(trace));
  p.psd_blocks.push_back(std::move(block));

  const auto r = solve_conic(p, options.limits, options.backend);
  SeparationResult out;
  out.status = r.status;
  out.solve_time = r.solve_time;
  if (!r.optimal()) throw Error(ErrorKind::Numerical, std::string("separation problem: ") + to_string(r.status) + " " + r.message);

  Cut cut;
  cut.mode = dnn ? CutMode::EDNN : CutMode::EPSD;
  cut.coeffs = EVector(z.support(), r.primal.head(ne));
  cut.certificate = embed_from_E(cut.coeffs).to_dense();
  for (std::size_t t = 0; t < outside.size(); ++t) {
    const double v = r.primal[ne + static_cast<int>(t)];
    cut.certificate(outside[t].i, outside[t].j) = cut.certificate(outside[t].j, outside[t].i) = v;
  }
  out.objective = evec_inner(cut.coeffs, z);
  cut.violation = out.objective;
  if (out.objective < -options.tol_violation) out.cut = std::move(cut);
  return out;
}

}  // namespace

SeparationResult separate_epsd(const EVector& z, const SeparationOptions& options) {
  return separate(z, false, options);
}

SeparationResult separate_ednn(const EVector& z, bool instance_nonneg, const SeparationOptions& options) {
  if (!instance_nonneg)
    throw Error(ErrorKind::ModeViolation, "DNN separation is only valid for instances with x >= 0");
  return separate(z, true, options);
}

double ednn_two_matrix_value(const EVector& z, const SeparationOptions& options) {
  const auto& e = *z.support();
  const int dim = e.dim();
  const int ne = static_cast<int>(e.size());
  const auto full = SupportSet::full(dim);
  const int nc = static_cast<int>(full.size());
  // Coordinates: A on E, then C on every pair.
  ConicProblem p;
  p.num_vars = ne + nc;
  p.objective = Eigen::VectorXd::Zero(p.num_vars);
  for (int k = 0; k < ne; ++k) p.objective[k] = e.weight(static_cast<std::size_t>(k)) * z.values()[k];
  LinearRow trace{{}, Sense::Le, 1.0};
  PsdBlock block;
  block.dim = dim;
  for (int k = 0; k < nc; ++k) {
    const auto [i, j] = full.pair(static_cast<std::size_t>(k));
    block.terms.push_back({i, j, ne + k, 1.0});
    const int a = e.find(i, j);
    // A_ij - C_ij >= 0 with A_ij = 0 outside E.
    LinearRow dominate{{{ne + k, -1.0}}, Sense::Ge, 0.0};
    if (a >= 0) dominate.coeffs.emplace_back(a, 1.0);
    p.rows.push_back(std::move(dominate));
    if (i == j && a >= 0) trace.coeffs.emplace_back(a, 1.0);
  }
  p.rows.push_back(std::move(trace));
  p.psd_blocks.push_back(std::move(block));
  const auto r = solve_conic(p, options.limits, options.backend);
  if (!r.optimal()) throw Error(ErrorKind::Numerical, std::string("two-matrix problem: ") + to_string(r.status));
  return r.objective;
}

EVector blend_point(const EVector& z_lp, const EVector& y_sdp, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  if (!z_lp.support() || !y_sdp.support() || !same_support(*z_lp.support(), *y_sdp.support()))
    throw Error(ErrorKind::SupportMismatch, "blended points must share a support");
  return EVector(z_lp.support(), alpha * z_lp.values() + (1.0 - alpha) * y_sdp.values());
}

}  // namespace sparsecut
