#include <map>
#include <random>

#include "doctest.h"
#include "sparsecut/driver.hpp"
#include "sparsecut/global.hpp"
#include "sparsecut/instance.hpp"

using namespace sparsecut;

namespace {

QcqpInstance unit_box(std::string name, int n, std::vector<Triplet> q, std::vector<QuadraticForm> cons = {}) {
  std::vector<QuadraticForm> forms{{std::move(q), Eigen::VectorXd::Zero(n), 0.0}};
  for (auto& c : cons) forms.push_back(std::move(c));
  return QcqpInstance(std::move(name), n, std::move(forms), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n));
}

Eigen::VectorXd sample_box(std::mt19937_64& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(lo.size());
  for (int i = 0; i < x.size(); ++i) x[i] = lo[i] + u(rng) * (hi[i] - lo[i]);
  return x;
}

}  // namespace

TEST_CASE("minimize -x^2 on [0,1]") {
  const auto inst = unit_box("negsq", 1, {{0, 0, -1.0}});
  const auto r = solve_global(inst, {});
  CHECK(r.status == "optimal");
  CHECK(r.z_best == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.x_best[0] == doctest::Approx(1.0));
  CHECK(r.nodes <= 3);
}

TEST_CASE("minimize -x1 x2 on the unit square") {
  const auto inst = unit_box("bilin", 2, {{0, 1, -0.5}});
  const auto r = solve_global(inst, {});
  CHECK(r.status == "optimal");
  CHECK(r.z_best == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.x_best[0] == doctest::Approx(1.0));
  CHECK(r.x_best[1] == doctest::Approx(1.0));
  CHECK(r.bound <= r.z_best + 1e-9);
}

TEST_CASE("an infeasible instance is reported") {
  // x^2 + 1 <= 0 has no solution.
  QuadraticForm con{{{0, 0, 1.0}}, Eigen::VectorXd::Zero(1), 1.0};
  const auto inst = unit_box("nofeas", 1, {{0, 0, -1.0}}, {con});
  CHECK(solve_global(inst, {}).status == "infeasible");
  CHECK_FALSE(brute_force_grid(inst, 11).found);
}

TEST_CASE("brute_force_grid examples") {
  CHECK(brute_force_grid(unit_box("negsq", 1, {{0, 0, -1.0}}), 11).z == -1.0);

  // Convex with interior optimum: (x - 0.37)^2 + (y - 0.61)^2 with the constant dropped.
  QuadraticForm obj{{{0, 0, 1.0}, {1, 1, 1.0}}, Eigen::Vector2d(-0.74, -1.22), 0.37 * 0.37 + 0.61 * 0.61};
  const QcqpInstance convex("cvx", 2, {obj}, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
  const auto g = brute_force_grid(convex, 11);
  REQUIRE(g.found);
  const auto sdp = solve_conic(build_shor_sdp(convex, {}));
  REQUIRE(sdp.optimal());
  CHECK(std::abs(g.z - sdp.objective) <= 1e-3);
  CHECK(g.z <= g.z_grid);
}

TEST_CASE("polish keeps feasibility and never worsens the start") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto inst = generate_boxqcqp({.n = 4, .rho = 0.6, .num_qc = 2, .seed = seed});
    std::mt19937_64 rng(seed);
    for (int t = 0; t < 5; ++t) {
      const Eigen::VectorXd x0 = sample_box(rng, inst.lower(), inst.upper());
      const auto x = polish(inst, x0);
      if (!x) continue;
      CHECK(inst.max_violation(*x) <= kFeasTol);
      CHECK(((*x).array() >= inst.lower().array()).all());
      CHECK(((*x).array() <= inst.upper().array()).all());
      if (inst.max_violation(x0) <= kFeasTol) CHECK(inst.objective_value(*x) <= inst.objective_value(x0) + 1e-12);
    }
  }
}

TEST_CASE("random n=5 instances match the grid oracle") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto inst = generate_boxqcqp({.n = 5, .rho = 0.5, .num_qc = static_cast<int>(seed % 3), .seed = seed});
    const auto r = solve_global(inst, {});
    const auto g = brute_force_grid(inst, 11);
    REQUIRE(r.status == "optimal");
    REQUIRE(g.found);
    // The grid value is feasible, so the incumbent is at most eps_rel above it.
    CHECK(r.z_best <= g.z + 1e-4 * std::max(1.0, std::abs(g.z)));
    CHECK(r.bound <= g.z + 1e-9);
    CHECK(r.gap <= 1e-4);
    CHECK(std::abs(r.z_best - g.z) / std::max(1.0, std::abs(g.z)) <= 1e-3);
  }
}

TEST_CASE("node bounds: sandwich, inheritance and global monotonicity") {
  // First instance in the seed sequence that actually branches.
  QcqpInstance inst;
  GlobalResult r;
  for (std::uint64_t seed = 1; seed < 50 && r.trail.size() < 5; ++seed) {
    inst = generate_boxqcqp({.n = 4, .rho = 1.0, .num_qc = 1, .seed = seed});
    r = solve_global(inst, {});
  }
  REQUIRE(r.status == "optimal");
  REQUIRE(r.trail.size() >= 5);
  std::map<long, double> bound_of;
  for (const auto& node : r.trail) {
    bound_of[node.id] = node.bound;
    if (node.parent >= 0) CHECK(node.bound >= bound_of.at(node.parent) - 1e-9);
    CHECK((node.lower.array() >= inst.lower().array()).all());
    CHECK((node.upper.array() <= inst.upper().array()).all());
    const auto local = brute_force_grid(QcqpInstance(inst.name(), inst.n(), inst.forms(), node.lower, node.upper), 7);
    if (local.found) CHECK(node.bound <= local.z + 1e-6 * std::max(1.0, std::abs(local.z)));
  }
  CHECK(r.root_bound <= r.bound + 1e-9);
  CHECK(r.bound <= r.z_best + 1e-9);
}

TEST_CASE("exported cuts stay valid in random sub-boxes") {
  const auto inst = generate_boxqcqp({.n = 5, .rho = 0.5, .num_qc = 1, .seed = 2});
  const auto trace = run_cutting_plane(inst, {StrategyKind::SparseCuts, ConeMode::EPSD});
  REQUIRE(!trace.cuts.empty());
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    Eigen::VectorXd a = sample_box(rng, inst.lower(), inst.upper());
    Eigen::VectorXd b = sample_box(rng, inst.lower(), inst.upper());
    const Eigen::VectorXd x = sample_box(rng, a.cwiseMin(b), a.cwiseMax(b));
    const EVector z = project_to_E(lift(x), trace.space);
    for (const auto& c : trace.cuts) worst = std::min(worst, c.evaluate(z));
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("cuts tighten the root and leave the optimum unchanged") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto inst = generate_boxqcqp({.n = 5, .rho = 1.0, .num_qc = 1, .seed = seed});
    const auto trace = run_cutting_plane(inst, {StrategyKind::SparseCuts, ConeMode::EPSD});
    const auto plain = solve_global(inst, {});
    const auto cut = solve_global(inst, trace.cuts);
    CHECK(std::abs(plain.z_best - cut.z_best) <= 1e-6 * std::max(1.0, std::abs(plain.z_best)));
    CHECK(cut.root_bound >= plain.root_bound - 1e-7 * std::max(1.0, std::abs(plain.root_bound)));
  }
}

TEST_CASE("cuts from another support are rejected") {
  const auto inst = generate_boxqcqp({.n = 4, .rho = 0.5, .num_qc = 0, .seed = 1});
  const auto full = std::make_shared<const SupportSet>(SupportSet::full(5));
  Cut c;
  c.coeffs = EVector(full);
  CHECK_THROWS_AS(solve_global(inst, {c}), Error);
}

TEST_CASE("node limit is reported") {
  const auto inst = generate_boxqcqp({.n = 5, .rho = 1.0, .num_qc = 2, .seed = 5});
  const auto r = solve_global(inst, {}, {.node_limit = 1});
  CHECK(r.status == "node_limit");
  CHECK(r.bound <= r.z_best);
}
