#include <random>
#include <sstream>

#include "doctest.h"
#include "sparsecut/instance.hpp"
#include "sparsecut/relaxation.hpp"
#include "sparsecut/separation.hpp"

using namespace sparsecut;

namespace {

SupportPtr example_support() {
  const std::vector<Pair> listed{{0, 0}, {2, 0}, {0, 2}, {1, 1}, {2, 1}, {1, 2}, {2, 2}};
  return std::make_shared<const SupportSet>(3, listed);
}

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  const int rank = 1 + static_cast<int>(rng() % static_cast<unsigned>(d));
  Eigen::MatrixXd b(d, rank);
  for (int i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
  return b * b.transpose();
}

Eigen::MatrixXd random_dnn(std::mt19937_64& rng, int d) {
  Eigen::MatrixXd y = random_psd(rng, d);
  const double shift = std::max(0.0, -y.minCoeff());
  return y + shift * Eigen::MatrixXd::Ones(d, d);
}

SupportPtr random_support(std::mt19937_64& rng, int dim, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Pair> extra;
  for (int i = 1; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (u(rng) < density) extra.push_back({i, j});
  return std::make_shared<const SupportSet>(SupportSet::with_mandated(dim, extra));
}

// A point that is typically outside S+_E: projection of an indefinite matrix.
EVector random_point(std::mt19937_64& rng, const SupportPtr& e, bool nonneg) {
  std::normal_distribution<double> g;
  const int d = e->dim();
  Eigen::MatrixXd y = random_psd(rng, d);
  Eigen::MatrixXd noise(d, d);
  for (int i = 0; i < noise.size(); ++i) noise.data()[i] = g(rng);
  y += 0.8 * (noise + noise.transpose());
  EVector z = project_to_E(y, e);
  if (nonneg) z.values() = z.values().cwiseAbs();
  return z;
}

void check_certificate(const Cut& cut, const SupportSet& e) {
  CHECK(min_eigenvalue(cut.certificate) >= -1e-7);
  CHECK(cut.certificate.trace() <= 1.0 + 1e-8);
  for (int i = 0; i < cut.certificate.rows(); ++i) CHECK(cut.certificate(i, i) >= -1e-9);
  for (int i = 0; i < e.dim(); ++i)
    for (int j = 0; j < e.dim(); ++j) {
      if (e.contains(i, j)) {
        CHECK(cut.certificate(i, j) == cut.coeffs.at(i, j));
      } else if (cut.mode == CutMode::EPSD) {
        CHECK(cut.certificate(i, j) == 0.0);
      } else {
        CHECK(cut.certificate(i, j) <= 1e-9);
      }
    }
}

}  // namespace

TEST_CASE("dense eigenvector cuts") {
  CHECK(dense_eigen_cuts(SymMatrix::identity(3)).empty());

  SymMatrix minus = SymMatrix::identity(3);
  for (int i = 0; i < 3; ++i) minus(i, i) = -1.0;
  CHECK(dense_eigen_cuts(minus).size() == 3);

  Eigen::MatrixXd zbar(3, 3);
  zbar << 1, 0, 1, 0, 1, 1, 1, 1, 1;
  const auto cuts = dense_eigen_cuts(SymMatrix::from_dense(zbar));
  REQUIRE(cuts.size() == 1);
  const Eigen::VectorXd& v = cuts[0].eigenvector;
  CHECK(v.dot(zbar * v) == doctest::Approx(1.0 - std::sqrt(2.0)).epsilon(1e-9));
  CHECK(cuts[0].coeffs.support()->size() == 6);
  // <vv^T, Zbar> over the full support equals v^T Zbar v.
  CHECK(cuts[0].evaluate(project_to_E(zbar, cuts[0].coeffs.support())) == doctest::Approx(v.dot(zbar * v)));
}

TEST_CASE("separate_epsd on the projection of a PSD matrix finds nothing") {
  std::mt19937_64 rng(1);
  auto e = random_support(rng, 6, 0.4);
  for (int t = 0; t < 5; ++t) {
    const auto r = separate_epsd(project_to_E(random_psd(rng, 6), e));
    CHECK_FALSE(r.violated());
    CHECK(r.objective >= -1e-7);
  }
}

TEST_CASE("separate_epsd: a negative diagonal entry gives the unit indicator cut") {
  auto e = std::make_shared<const SupportSet>(SupportSet::with_mandated(3, {}));
  EVector z(e);
  z.set(0, 0, 1.0);
  z.set(1, 1, -1.0);
  z.set(2, 2, 1.0);
  const auto r = separate_epsd(z);
  REQUIRE(r.violated());
  CHECK(r.objective == doctest::Approx(-1.0).epsilon(1e-7));
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
  expected(1, 1) = 1.0;
  CHECK((r.cut->certificate - expected).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("separate_epsd: the worked example is not separable") {
  const auto r = separate_epsd(project_to_E(Eigen::MatrixXd::Ones(3, 3), example_support()));
  CHECK_FALSE(r.violated());
  CHECK(std::abs(r.objective) <= 1e-7);
}

TEST_CASE("certificates and objective agreement on random points") {
  std::mt19937_64 rng(2);
  int violated = 0;
  for (int t = 0; t < 15; ++t) {
    auto e = random_support(rng, 3 + t % 5, 0.3);
    const EVector z = random_point(rng, e, true);
    for (bool dnn : {false, true}) {
      const auto r = dnn ? separate_ednn(z, true) : separate_epsd(z);
      if (!r.violated()) continue;
      ++violated;
      check_certificate(*r.cut, *e);
      CHECK(r.cut->evaluate(z) == doctest::Approx(r.objective).epsilon(1e-12));
      CHECK(r.cut->violation == r.objective);
    }
  }
  CHECK(violated > 10);
}

TEST_CASE("EPSD cuts are valid for random PSD matrices, EDNN cuts for random DNN matrices") {
  std::mt19937_64 rng(3);
  auto e = random_support(rng, 6, 0.3);
  std::vector<Cut> epsd, ednn;
  for (int t = 0; t < 6; ++t) {
    const EVector z = random_point(rng, e, true);
    if (auto r = separate_epsd(z); r.cut) epsd.push_back(*r.cut);
    if (auto r = separate_ednn(z, true); r.cut) ednn.push_back(*r.cut);
  }
  REQUIRE(!epsd.empty());
  REQUIRE(!ednn.empty());
  double worst_psd = 0.0, worst_dnn = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const EVector y = project_to_E(random_psd(rng, 6), e);
    for (const auto& c : epsd) worst_psd = std::min(worst_psd, c.evaluate(y));
    const EVector w = project_to_E(random_dnn(rng, 6), e);
    for (const auto& c : ednn) worst_dnn = std::min(worst_dnn, c.evaluate(w));
  }
  CHECK(worst_psd >= -1e-7);
  CHECK(worst_dnn >= -1e-7);
}

TEST_CASE("the DNN separation value never exceeds the PSD one") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    auto e = random_support(rng, 5, 0.3);
    const EVector z = random_point(rng, e, true);
    CHECK(separate_ednn(z, true).objective <= separate_epsd(z).objective + 1e-8);
  }
}

TEST_CASE("projections of DNN matrices are not DNN-separable") {
  std::mt19937_64 rng(5);
  auto e = random_support(rng, 5, 0.3);
  for (int t = 0; t < 5; ++t) CHECK_FALSE(separate_ednn(project_to_E(random_dnn(rng, 5), e), true).violated());
}

TEST_CASE("DNN separation refuses sign-unrestricted instances") {
  auto e = std::make_shared<const SupportSet>(SupportSet::with_mandated(3, {}));
  try {
    separate_ednn(EVector(e), false);
    FAIL("expected a mode violation");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::ModeViolation);
  }
}

TEST_CASE("the two-matrix DNN formulation has the same value") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 6; ++t) {
    auto e = random_support(rng, 4 + t % 3, 0.3);
    const EVector z = random_point(rng, e, true);
    CHECK(ednn_two_matrix_value(z) == doctest::Approx(separate_ednn(z, true).objective).epsilon(1e-6));
  }
}

TEST_CASE("separation agrees with the completion oracle") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    auto e = random_support(rng, 3 + t % 5, 0.4);
    // Alternate clearly completable points with generic ones.
    const EVector z = t % 2 ? project_to_E(random_psd(rng, e->dim()), e) : random_point(rng, e, false);
    const auto sep = separate_epsd(z);
    const auto completion = complete_to_psd_detail(z);
    if (std::abs(sep.objective) > 1e-7) CHECK((sep.objective < -1e-7) == !completion.completion.has_value());
  }
}

TEST_CASE("blend_point") {
  auto e = std::make_shared<const SupportSet>(SupportSet::with_mandated(2, {}));
  EVector a(e), b(e);
  a.values().setZero();
  b.values().setConstant(2.0);
  CHECK(blend_point(a, b, 0.5).values() == Eigen::VectorXd::Constant(3, 1.0));
  CHECK(blend_point(b, b, 0.3).values().isApprox(b.values()));
  CHECK_THROWS_AS(blend_point(a, b, 0.0), Error);
  CHECK_THROWS_AS(blend_point(a, b, 1.0), Error);
}

TEST_CASE("separable LP points stay separable after blending toward the SDP optimum") {
  const auto inst = generate_boxqcqp({.n = 5, .rho = 0.4, .num_qc = 1, .seed = 3});
  const auto sdp = build_shor_sdp(inst, {.mccormick = McCormickMode::E});
  const auto rs = solve_conic(sdp);
  REQUIRE(rs.optimal());
  const auto lp = build_e_lp(inst, {}, McCormickMode::E);
  const auto rl = solve_conic(lp);
  REQUIRE(rl.optimal());
  const EVector z_lp = solution_point(lp, rl);
  const EVector y_e = project_to_E(embed_from_E(solution_point(sdp, rs)), lp.space);
  REQUIRE(separate_epsd(z_lp).violated());
  for (double alpha : {0.5, 0.1, 0.001}) CHECK(separate_epsd(blend_point(z_lp, y_e, alpha), {.tol_violation = 1e-9}).violated());
}

TEST_CASE("cut pool JSON round trip") {
  std::mt19937_64 rng(8);
  auto e = random_support(rng, 5, 0.5);
  std::vector<Cut> cuts;
  for (int t = 0; t < 3; ++t)
    if (auto r = separate_epsd(random_point(rng, e, false)); r.cut) cuts.push_back(*r.cut);
  REQUIRE(!cuts.empty());
  std::stringstream ss;
  write_cut_pool(cuts, ss);
  const auto back = read_cut_pool(ss, e);
  REQUIRE(back.size() == cuts.size());
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    CHECK(back[k].coeffs.values() == cuts[k].coeffs.values());
    CHECK(back[k].mode == cuts[k].mode);
    CHECK(back[k].violation == cuts[k].violation);
  }
}
