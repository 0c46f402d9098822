#include "sparsecut/relaxation.hpp"

#include <map>

namespace sparsecut {

const char* to_string(McCormickMode mode) {
  switch (mode) {
    case McCormickMode::Off: return "off";
    case McCormickMode::E: return "E";
    case McCormickMode::Full: return "full";
  }
  return "?";
}

McCormickMode parse_mccormick_mode(const std::string& text) {
  if (text == "off") return McCormickMode::Off;
  if (text == "E" || text == "e") return McCormickMode::E;
  if (text == "full") return McCormickMode::Full;
  throw Error(ErrorKind::InvalidArgument, "unknown McCormick mode '" + text + "' (expected off, E or full)");
}

McCormickRow mccormick_rows(int i, int j, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (i < 1 || j < 1 || i > lower.size() || j > lower.size())
    throw Error(ErrorKind::DimensionMismatch, "envelope pair out of range");
  if (i > j) std::swap(i, j);
  const double li = lower[i - 1], ui = upper[i - 1], lj = lower[j - 1], uj = upper[j - 1];
  if (li > ui || lj > uj) throw Error(ErrorKind::InvalidArgument, "empty box");
  McCormickRow out{i, j, {}};
  if (i == j) {
    out.rows = {{-2.0 * li, 0.0, 1.0, -li * li},
                {-2.0 * ui, 0.0, 1.0, -ui * ui},
                {li + ui, 0.0, -1.0, li * ui}};
  } else {
    out.rows = {{-lj, -li, 1.0, -li * lj},
                {-uj, -ui, 1.0, -ui * uj},
                {uj, li, -1.0, li * uj},
                {lj, ui, -1.0, ui * lj}};
  }
  return out;
}

namespace {

// Y_00 = 1, bounds on Y_0i and the quadratic rows, all over `space`.
ConicProblem lifted_base(const QcqpInstance& inst, const SupportPtr& space, const Eigen::VectorXd& lower,
                         const Eigen::VectorXd& upper) {
  const auto e = build_support_set(inst);
  for (const auto& p : e->pairs())
    if (!space->contains(p.i, p.j))
      throw Error(ErrorKind::SupportMismatch, "variable space does not contain the instance support");
  const int nv = static_cast<int>(space->size());
  ConicProblem p;
  p.num_vars = nv;
  p.space = space;
  p.lower = Eigen::VectorXd::Constant(nv, -std::numeric_limits<double>::infinity());
  p.upper = Eigen::VectorXd::Constant(nv, std::numeric_limits<double>::infinity());
  for (int i = 1; i <= inst.n(); ++i) {
    const int k = space->find(0, i);
    p.lower[k] = lower[i - 1];
    p.upper[k] = upper[i - 1];
  }
  p.rows.push_back({{{space->find(0, 0), 1.0}}, Sense::Eq, 1.0});

  auto form_coeffs = [&](const QuadraticForm& f) {
    const EVector h = homogenized(f, space);
    std::vector<std::pair<int, double>> coeffs;
    for (std::size_t k = 0; k < space->size(); ++k) {
      const double v = h.values()[static_cast<Eigen::Index>(k)];
      if (v != 0.0) coeffs.emplace_back(static_cast<int>(k), space->weight(k) * v);
    }
    return coeffs;
  };
  const auto obj = form_coeffs(inst.objective());
  p.objective = Eigen::VectorXd::Zero(nv);
  for (const auto& [k, v] : obj) p.objective[k] = v;
  for (int k = 1; k <= inst.m(); ++k) p.rows.push_back({form_coeffs(inst.form(k)), Sense::Le, 0.0});
  return p;
}

void add_envelopes(ConicProblem& p, const QcqpInstance& inst, McCormickMode mode, const Eigen::VectorXd& lower,
                   const Eigen::VectorXd& upper) {
  if (mode == McCormickMode::Off) return;
  const auto& space = *p.space;
  const auto e = build_support_set(inst);
  for (int i = 1; i <= inst.n(); ++i)
    for (int j = i; j <= inst.n(); ++j) {
      if (mode == McCormickMode::E && !e->contains(i, j)) continue;
      if (!space.contains(i, j))
        throw Error(ErrorKind::SupportMismatch, "full McCormick mode needs every lifted pair in the variable space");
      const auto env = mccormick_rows(i, j, lower, upper);
      const int xi = space.find(0, i), xj = space.find(0, j), xx = space.find(i, j);
      for (const auto& r : env.rows) {
        std::map<int, double> merged;
        merged[xi] += r.x_coef_i;
        merged[xj] += r.x_coef_j;
        merged[xx] += r.xx_coef;
        LinearRow row{{}, Sense::Ge, r.rhs};
        for (const auto& [k, v] : merged)
          if (v != 0.0) row.coeffs.emplace_back(k, v);
        p.rows.push_back(std::move(row));
      }
    }
}

}  // namespace

ConicProblem build_shor_sdp(const QcqpInstance& inst, const ShorOptions& options) {
  if (options.dnn && !inst.nonneg())
    throw Error(ErrorKind::ModeViolation, "the doubly nonnegative relaxation needs nonnegative lower bounds");
  const int dim = inst.n() + 1;
  auto space = std::make_shared<const SupportSet>(SupportSet::full(dim));
  ConicProblem p = lifted_base(inst, space, inst.lower(), inst.upper());
  add_envelopes(p, inst, options.mccormick, inst.lower(), inst.upper());
  if (options.dnn)
    for (int k = 0; k < p.num_vars; ++k) p.lower[k] = std::max(p.lower[k], 0.0);
  PsdBlock block;
  block.dim = dim;
  for (std::size_t k = 0; k < space->size(); ++k) {
    const auto [i, j] = space->pair(k);
    block.terms.push_back({i, j, static_cast<int>(k), 1.0});
  }
  p.psd_blocks.push_back(std::move(block));
  return p;
}

ConicProblem build_lp(const QcqpInstance& inst, const SupportPtr& space, std::span<const Cut> cuts,
                      McCormickMode mccormick, const Eigen::VectorXd* lower, const Eigen::VectorXd* upper) {
  const Eigen::VectorXd& lo = lower ? *lower : inst.lower();
  const Eigen::VectorXd& hi = upper ? *upper : inst.upper();
  if (lo.size() != inst.n() || hi.size() != inst.n()) throw Error(ErrorKind::DimensionMismatch, "box has wrong length");
  ConicProblem p = lifted_base(inst, space, lo, hi);
  add_envelopes(p, inst, mccormick, lo, hi);
  for (const auto& cut : cuts) {
    if (!cut.coeffs.support() || !same_support(*cut.coeffs.support(), *space))
      throw Error(ErrorKind::SupportMismatch, "cut lives on a different support than the LP");
    LinearRow row{{}, Sense::Ge, 0.0};
    for (std::size_t k = 0; k < space->size(); ++k) {
      const double v = cut.coeffs.values()[static_cast<Eigen::Index>(k)];
      if (v != 0.0) row.coeffs.emplace_back(static_cast<int>(k), space->weight(k) * v);
    }
    p.rows.push_back(std::move(row));
  }
  return p;
}

ConicProblem build_e_lp(const QcqpInstance& inst, std::span<const Cut> cuts, McCormickMode mccormick) {
  return build_lp(inst, build_support_set(inst), cuts, mccormick);
}

EVector solution_point(const ConicProblem& problem, const SolveResult& result) {
  if (!problem.space) throw Error(ErrorKind::InvalidArgument, "problem has no lifted variable space");
  if (result.primal.size() < static_cast<Eigen::Index>(problem.space->size()))
    throw Error(ErrorKind::DimensionMismatch, "solution shorter than the variable space");
  return EVector(problem.space, result.primal.head(static_cast<Eigen::Index>(problem.space->size())));
}

}  // namespace sparsecut
