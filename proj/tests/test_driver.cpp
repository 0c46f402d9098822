#include <sstream>

#include "doctest.h"
#include "sparsecut/driver.hpp"
#include "sparsecut/instance.hpp"

using namespace sparsecut;

namespace {

// Instances whose McCormick and SDP bounds differ, so GC is defined.
std::vector<QcqpInstance> gapped(int n, int count, double rho = 0.5) {
  std::vector<QcqpInstance> out;
  for (std::uint64_t seed = 1; static_cast<int>(out.size()) < count && seed < 100; ++seed) {
    auto inst = generate_boxqcqp({.n = n, .rho = rho, .num_qc = static_cast<int>(seed % 3), .seed = seed});
    const auto ref = compute_reference(inst, false);
    if (ref.z_ref - ref.z_mcc > 1e-4 * std::max(1.0, std::abs(ref.z_ref))) out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace

TEST_CASE("gap_closed") {
  CHECK(gap_closed(-10.0, -10.0, -2.0) == 0.0);
  CHECK(gap_closed(-2.0, -10.0, -2.0) == 1.0);
  CHECK(gap_closed(-4.0, -10.0, -2.0) == 0.75);
  try {
    gap_closed(0.0, 1.0, 1.0);
    FAIL("expected a degenerate gap");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::DegenerateGap);
  }
}

TEST_CASE("strategy and cone names") {
  for (auto k : kAllStrategies) {
    CHECK(parse_strategy(short_name(k)) == k);
    CHECK(parse_strategy(to_string(k)) == k);
  }
  CHECK(parse_cone_mode("ednn") == ConeMode::EDNN);
  CHECK_THROWS_AS(parse_strategy("sparse-ish"), Error);
  CHECK_THROWS_AS(parse_cone_mode("psd"), Error);
}

TEST_CASE("a convex instance stops at iteration 0") {
  QuadraticForm obj{{{0, 0, 1.0}, {1, 1, 2.0}, {0, 1, 0.5}}, Eigen::Vector2d(-1.0, 0.3), 0.0};
  const QcqpInstance inst("cvx", 2, {obj}, -Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2));
  const auto t = run_cutting_plane(inst, {StrategyKind::SparseCuts, ConeMode::EPSD}, {.gc_target = 2.0});
  REQUIRE(t.iterations.size() >= 1);
  // Either the gap is degenerate and the first LP point is already completable,
  // or a handful of cuts closes it.
  if (std::isnan(t.final_gc)) {
    CHECK(t.status == "no_violated_cut");
    CHECK(t.separation_rounds() == 0);
  }
  CHECK(std::abs(t.z_lp - t.z_ref) <= 1e-5 * std::max(1.0, std::abs(t.z_ref)));
}

TEST_CASE("dense and sparse strategies reach the target with the expected column counts") {
  const auto insts = gapped(3, 2, 1.0);
  REQUIRE(insts.size() == 2);
  for (const auto& inst : insts) {
    const int e = static_cast<int>(build_support_set(inst)->size());
    for (auto k : kAllStrategies) {
      const auto t = run_cutting_plane(inst, {k, ConeMode::EPSD});
      CHECK(t.status == "gc_target");
      CHECK(t.final_gc >= 0.99);
      CHECK(t.lp_columns == (Strategy{k}.sparse() ? e : (inst.n() + 1) * (inst.n() + 2) / 2));
    }
  }
}

TEST_CASE("GC is monotone and terminal bounds reach the SDP bound") {
  for (const auto& inst : gapped(6, 3)) {
    for (auto k : {StrategyKind::SparseCuts, StrategyKind::SdpPlusSparseCuts, StrategyKind::DenseCuts}) {
      const auto t = run_cutting_plane(inst, {k, ConeMode::EPSD}, {.gc_target = std::numeric_limits<double>::infinity()});
      CHECK(t.status == "no_violated_cut");
      for (std::size_t i = 1; i < t.iterations.size(); ++i)
        CHECK(t.iterations[i].gc >= t.iterations[i - 1].gc - 1e-8);
      CHECK(std::abs(t.z_lp - t.z_ref) / std::max(1.0, std::abs(t.z_ref)) <= 1e-5);
      CHECK(static_cast<int>(t.cuts.size()) == t.iterations.back().num_cuts);
    }
  }
}

TEST_CASE("auto cone mode falls back to EPSD on sign-unrestricted instances") {
  auto inst = generate_boxqcqp({.n = 4, .rho = 0.5, .num_qc = 1, .seed = 2});
  REQUIRE(inst.nonneg());
  CHECK(effective_cut_mode({StrategyKind::SparseCuts, ConeMode::Auto}, inst) == CutMode::EDNN);
  CHECK(effective_cut_mode({StrategyKind::DenseCuts, ConeMode::Auto}, inst) == CutMode::Dense);

  Eigen::VectorXd lo = inst.lower();
  lo[0] = -1.0;
  const QcqpInstance signed_inst(inst.name(), inst.n(), inst.forms(), lo, inst.upper());
  CHECK(effective_cut_mode({StrategyKind::SparseCuts, ConeMode::Auto}, signed_inst) == CutMode::EPSD);
  CHECK_THROWS_AS(effective_cut_mode({StrategyKind::SparseCuts, ConeMode::EDNN}, signed_inst), Error);
  const auto t = run_cutting_plane(signed_inst, {StrategyKind::SparseCuts, ConeMode::Auto});
  CHECK(t.cut_mode == CutMode::EPSD);
}

TEST_CASE("accelerated runs record the blended point and fall back when it is clean") {
  const auto inst = gapped(5, 1).front();
  int blended = 0;
  DriverOptions opts;
  opts.on_iteration = [&](const IterationView& v) {
    REQUIRE(v.z_alpha != nullptr);
    ++blended;
  };
  const auto t = run_cutting_plane(inst, {StrategyKind::SdpPlusSparseCuts, ConeMode::EPSD},
                                   {.gc_target = std::numeric_limits<double>::infinity()}, opts);
  CHECK(blended == static_cast<int>(t.iterations.size()));
  CHECK(t.t_sdp > 0.0);
  // The final round separates Z_LP directly after finding nothing at the blend.
  CHECK(t.fallbacks >= 1);
  CHECK(t.iterations.back().fallback);
  CHECK_THROWS_AS(run_cutting_plane(inst, {StrategyKind::SdpPlusSparseCuts, ConeMode::EPSD, 1.0}), Error);
}

TEST_CASE("trace CSV layout") {
  const auto inst = gapped(4, 1).front();
  const auto t = run_cutting_plane(inst, {StrategyKind::SparseCuts, ConeMode::EPSD});
  std::stringstream ss;
  write_trace_csv(t, ss);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "iter,cuts,GC,z_lp,t_lastlp,t_sep,t_SDP");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == static_cast<int>(t.iterations.size()));
}

TEST_CASE("purging slack cuts preserves the bound") {
  const auto inst = gapped(6, 1, 1.0).front();
  const auto t = run_cutting_plane(inst, {StrategyKind::SparseCuts, ConeMode::EPSD},
                                   {.gc_target = std::numeric_limits<double>::infinity()});
  const auto kept = purge_slack_cuts(inst, t.cuts);
  CHECK(kept.size() <= t.cuts.size());
  const auto r = solve_conic(build_lp(inst, t.space, kept, McCormickMode::E));
  REQUIRE(r.optimal());
  CHECK(std::abs(r.objective - t.z_lp) <= 1e-6 * std::max(1.0, std::abs(t.z_lp)));
}
