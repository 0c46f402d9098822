#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sparsecut/model.hpp"

namespace sparsecut {

enum class CutMode { EPSD, EDNN, Dense };

const char* to_string(CutMode mode);
CutMode parse_cut_mode(const std::string& text);

/// Linear inequality <C, Z> >= 0 over the coordinates of C's support.
struct Cut {
  EVector coeffs;
  CutMode mode = CutMode::EPSD;
  /// <C, Z> at the separated point.
  double violation = 0.0;
  /// EPSD/EDNN: the separation matrix whose restriction to E is C.
  Eigen::MatrixXd certificate;
  /// Dense: the eigenvector v with C = v v^T.
  Eigen::VectorXd eigenvector;

  double evaluate(const EVector& z) const { return evec_inner(coeffs, z); }
};

/// JSON list of {mode, pairs, values, violation}.
void write_cut_pool(const std::vector<Cut>& cuts, std::ostream& out);
/// Cuts are attached to `support`; pairs must belong to it.
std::vector<Cut> read_cut_pool(std::istream& in, const SupportPtr& support);

}  // namespace sparsecut
