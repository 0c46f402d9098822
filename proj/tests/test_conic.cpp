#include <random>
#include <sstream>

#include "doctest.h"
#include "sparsecut/conic.hpp"

using namespace sparsecut;

namespace {

ConicProblem one_var_lp(double objective) {
  ConicProblem p;
  p.num_vars = 1;
  p.objective = Eigen::VectorXd::Constant(1, objective);
  return p;
}

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int d, int rank) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd b(d, rank);
  for (int i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
  return b * b.transpose();
}

}  // namespace

TEST_CASE("LP: min x s.t. x >= 3") {
  auto p = one_var_lp(1.0);
  p.rows.push_back({{{0, 1.0}}, Sense::Ge, 3.0});
  const auto r = solve_conic(p);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(r.dual[0] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("LP with equality rows and bounds") {
  // min -x - 2y s.t. x + y = 1, 0 <= x, y <= 0.75
  ConicProblem p;
  p.num_vars = 2;
  p.objective = Eigen::Vector2d(-1.0, -2.0);
  p.rows.push_back({{{0, 1.0}, {1, 1.0}}, Sense::Eq, 1.0});
  p.lower = Eigen::Vector2d(0.0, 0.0);
  p.upper = Eigen::Vector2d(std::numeric_limits<double>::infinity(), 0.75);
  const auto r = solve_conic(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(-1.75).epsilon(1e-9));
  CHECK(r.primal[1] == doctest::Approx(0.75).epsilon(1e-8));
  CHECK(p.max_row_violation(r.primal) <= 1e-6);
}

TEST_CASE("LP: unbounded and infeasible problems are classified") {
  auto unbounded = one_var_lp(-1.0);
  unbounded.rows.push_back({{{0, 1.0}}, Sense::Ge, 0.0});
  CHECK(solve_conic(unbounded).status == SolveStatus::Unbounded);

  auto infeasible = one_var_lp(1.0);
  infeasible.rows.push_back({{{0, 1.0}}, Sense::Ge, 2.0});
  infeasible.rows.push_back({{{0, 1.0}}, Sense::Le, 1.0});
  CHECK(solve_conic(infeasible).status == SolveStatus::Infeasible);
}

TEST_CASE("SDP: min t s.t. [[t,1],[1,t]] psd") {
  auto p = one_var_lp(1.0);
  PsdBlock b;
  b.dim = 2;
  b.terms = {{0, 0, 0, 1.0}, {1, 1, 0, 1.0}, {0, 1, -1, 1.0}};
  p.psd_blocks.push_back(b);
  const auto r = solve_conic(p);
  REQUIRE(r.optimal());
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("SDP: maximal eigenvalue of a fixed matrix via t I - A psd") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial % 6;
    Eigen::MatrixXd a = random_psd(rng, d, d) - 2.0 * Eigen::MatrixXd::Identity(d, d);
    auto p = one_var_lp(1.0);
    PsdBlock b;
    b.dim = d;
    for (int i = 0; i < d; ++i) {
      b.terms.push_back({i, i, 0, 1.0});
      for (int j = i; j < d; ++j) b.terms.push_back({i, j, -1, -a(i, j)});
    }
    p.psd_blocks.push_back(b);
    const auto r = solve_conic(p);
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(eigendecomp(a).front().value).epsilon(1e-8));
  }
}

TEST_CASE("repeated solves are deterministic") {
  auto p = one_var_lp(1.0);
  PsdBlock b;
  b.dim = 2;
  b.terms = {{0, 0, 0, 1.0}, {1, 1, 0, 1.0}, {0, 1, -1, 1.0}};
  p.psd_blocks.push_back(b);
  const auto r1 = solve_conic(p);
  const auto r2 = solve_conic(p);
  CHECK(r1.status == r2.status);
  CHECK(std::abs(r1.objective - r2.objective) <= 1e-9);
}

TEST_CASE("eigendecomp returns descending orthonormal pairs that reconstruct the input") {
  CHECK(eigendecomp(SymMatrix::identity(4))[3].value == doctest::Approx(1.0));
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 9;
    Eigen::MatrixXd m(d, d);
    for (int i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    m = 0.5 * (m + m.transpose()).eval();
    const auto pairs = eigendecomp(m);
    Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (k > 0) CHECK(pairs[k - 1].value >= pairs[k].value);
      CHECK(pairs[k].vector.norm() == doctest::Approx(1.0));
      rec += pairs[k].value * pairs[k].vector * pairs[k].vector.transpose();
    }
    CHECK((m - rec).cwiseAbs().maxCoeff() <= 1e-8 * m.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("complete_to_psd: the all-ones projection is completable") {
  const std::vector<Pair> listed{{0, 0}, {2, 0}, {0, 2}, {1, 1}, {2, 1}, {1, 2}, {2, 2}};
  auto e = std::make_shared<const SupportSet>(3, listed);
  const EVector z = project_to_E(Eigen::MatrixXd::Ones(3, 3), e);
  const auto y = complete_to_psd(z);
  REQUIRE(y.has_value());
  const Eigen::MatrixXd yd = y->to_dense();
  CHECK(min_eigenvalue(yd) >= -1e-7);
  CHECK(yd(0, 2) == 1.0);
  CHECK(std::abs(yd(0, 1) - 1.0) <= 1e-4);  // the only completion is the all-ones matrix
}

TEST_CASE("complete_to_psd: a negative diagonal entry admits no completion") {
  auto e = std::make_shared<const SupportSet>(SupportSet::with_mandated(3, {}));
  EVector z(e);
  z.set(0, 0, 1.0);
  z.set(1, 1, -1.0);
  z.set(2, 2, 1.0);
  CHECK_FALSE(complete_to_psd(z).has_value());
}

TEST_CASE("SDPA export lists one line per nonzero") {
  auto p = one_var_lp(1.0);
  p.rows.push_back({{{0, 1.0}}, Sense::Ge, 3.0});
  PsdBlock b;
  b.dim = 2;
  b.terms = {{0, 0, 0, 1.0}, {1, 1, 0, 1.0}, {0, 1, -1, 1.0}};
  p.psd_blocks.push_back(b);
  std::ostringstream os;
  write_sdpa(p, os);
  const std::string s = os.str();
  CHECK(s.find("1\n2\n-1 2 \n") != std::string::npos);
  CHECK(s.find("0 2 1 2 -1\n") != std::string::npos);
  CHECK(s.find("1 2 2 2 1\n") != std::string::npos);
}
