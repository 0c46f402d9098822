#include <set>

#include "doctest.h"
#include "sparsecut/instance.hpp"

using namespace sparsecut;

namespace {

constexpr const char* kOneVar = R"(tiny # name
QCN
minimize
1            # variables
1            # objective quadratic terms
1 1 2.0
0.0          # default linear coefficient
0
0.0          # objective constant
1.0E+30
0.0          # default lower bound
0
1.0          # default upper bound
0
)";

// max x1 + 0.5 x1^2 - x1 x2  s.t.  x1^2 + x2 = 1,  -inf <= x2 - x1 <= 0.25, x in [0,2]x[-1,1]
constexpr const char* kTwoRow = R"(two
QCQ
maximize
2
2
2
1 1 1.0
2 1 -1.0
0.0
1
1 1.0
0.0
1
1 1 1 2.0
3
1 2 1.0
2 2 1.0
2 1 -1.0
1e30
1.0
1
2 -1e30
1.0
1
2 0.25
0.0
1
2 -1.0
1.0
1
1 2.0
)";

}  // namespace

TEST_CASE("generated constraints are active at the box centre") {
  const auto inst = generate_boxqcqp({.n = 2, .rho = 1.0, .num_qc = 1, .seed = 1});
  REQUIRE(inst.m() == 1);
  const Eigen::VectorXd half = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(inst.form(1).evaluate(half) == 0.0);
  CHECK(inst.is_feasible(half, 1e-9));
  CHECK(inst.nonneg());
  CHECK(inst.lower() == Eigen::VectorXd::Zero(2));
  CHECK(inst.upper() == Eigen::VectorXd::Ones(2));
}

TEST_CASE("k = 0 gives a pure box QP") {
  CHECK(generate_boxqcqp({.n = 5, .rho = 0.5, .num_qc = 0, .seed = 2}).m() == 0);
}

TEST_CASE("generator naming and determinism") {
  const GeneratorConfig cfg{.n = 20, .rho = 0.1, .num_qc = 5, .seed = 3};
  CHECK(instance_name(cfg) == "spar020-010-3_5qc");
  CHECK(to_json(generate_boxqcqp(cfg)) == to_json(generate_boxqcqp(cfg)));
  GeneratorConfig other = cfg;
  other.seed = 4;
  CHECK(to_json(generate_boxqcqp(other)) != to_json(generate_boxqcqp(cfg)));
}

TEST_CASE("every generated instance is feasible at x = 0.5 with exactly active constraints") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const GeneratorConfig cfg{.n = 3 + static_cast<int>(seed % 9), .rho = seed % 2 ? 0.3 : 1.0,
                              .num_qc = static_cast<int>(seed % 4), .seed = seed};
    const auto inst = generate_boxqcqp(cfg);
    const Eigen::VectorXd half = Eigen::VectorXd::Constant(cfg.n, 0.5);
    for (int k = 1; k <= inst.m(); ++k) CHECK(std::abs(inst.form(k).evaluate(half)) <= 1e-9);
    CHECK(inst.is_feasible(half, 1e-9));
  }
}

TEST_CASE("generated coefficients are integers in range, objective off-diagonals nonzero") {
  const auto inst = generate_boxqcqp({.n = 12, .rho = 0.5, .num_qc = 3, .seed = 9});
  for (int k = 0; k <= inst.m(); ++k) {
    const auto& f = inst.form(k);
    for (const auto& t : f.Q) {
      CHECK(t.value == std::round(t.value));
      CHECK(std::abs(t.value) <= 50.0);
    }
    for (int i = 0; i < inst.n(); ++i) CHECK(std::abs(f.c[i]) <= 50.0);
  }
}

TEST_CASE("constraint support lies inside the objective support") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = generate_boxqcqp({.n = 8, .rho = 0.3, .num_qc = 3, .seed = seed});
    // Dense scan of the objective.
    const Eigen::MatrixXd q0 = inst.objective().dense_Q(inst.n());
    for (int k = 1; k <= inst.m(); ++k) {
      const Eigen::MatrixXd qk = inst.form(k).dense_Q(inst.n());
      for (int i = 0; i < inst.n(); ++i)
        for (int j = i + 1; j < inst.n(); ++j)
          if (qk(i, j) != 0.0) CHECK(q0(i, j) != 0.0);
    }
    QcqpInstance objective_only("o", inst.n(), {inst.objective()}, inst.lower(), inst.upper());
    CHECK(*build_support_set(inst) == *build_support_set(objective_only));
  }
}

TEST_CASE("support size of spar020 at rho 0.25 matches a dense scan") {
  const auto inst = generate_boxqcqp({.n = 20, .rho = 0.25, .num_qc = 2, .seed = 7});
  std::set<std::pair<int, int>> offdiag;
  for (const auto& f : inst.forms()) {
    const Eigen::MatrixXd q = f.dense_Q(inst.n());
    for (int i = 0; i < inst.n(); ++i)
      for (int j = i + 1; j < inst.n(); ++j)
        if (q(i, j) != 0.0) offdiag.insert({i, j});
  }
  CHECK(build_support_set(inst)->size() == 1 + 20 + 20 + offdiag.size());
  // Roughly a quarter of the 190 strict upper entries.
  CHECK(offdiag.size() > 25);
  CHECK(offdiag.size() < 75);
}

TEST_CASE("constraint support fraction thins constraint coefficients") {
  GeneratorConfig cfg{.n = 15, .rho = 1.0, .num_qc = 1, .seed = 4};
  cfg.constraint_support_fraction = 0.2;
  const auto inst = generate_boxqcqp(cfg);
  CHECK(inst.form(1).Q.size() < inst.objective().Q.size() / 2);
  CHECK(inst.form(1).evaluate(Eigen::VectorXd::Constant(15, 0.5)) == 0.0);
}

TEST_CASE("generator rejects invalid configurations") {
  CHECK_THROWS_AS(generate_boxqcqp({.n = 1}), Error);
  CHECK_THROWS_AS(generate_boxqcqp({.n = 4, .rho = 0.0}), Error);
  CHECK_THROWS_AS(generate_boxqcqp({.n = 4, .rho = 1.5}), Error);
  CHECK_THROWS_AS(generate_boxqcqp({.n = 4, .rho = 0.5, .num_qc = -1}), Error);
}

TEST_CASE("QPLIB: one variable with objective x^2") {
  const auto inst = parse_qplib_subset(kOneVar);
  CHECK(inst.n() == 1);
  CHECK(inst.m() == 0);
  CHECK(inst.objective().dense_Q(1)(0, 0) == 1.0);
  CHECK(inst.upper()[0] == 1.0);
  CHECK(inst.name() == "tiny");
}

TEST_CASE("QPLIB: maximization, equality split and one-sided rows") {
  const auto inst = parse_qplib_subset(kTwoRow);
  REQUIRE(inst.n() == 2);
  // Equality row gives two inequalities, the one-sided row one.
  REQUIRE(inst.m() == 3);
  Eigen::Vector2d x(0.7, -0.3);
  const double native_obj = x[0] + 0.5 * x[0] * x[0] - x[0] * x[1];
  CHECK(inst.objective_value(x) == doctest::Approx(-native_obj));
  const double g1 = x[0] * x[0] + x[1];
  CHECK(inst.form(1).evaluate(x) == doctest::Approx(1.0 - g1));
  CHECK(inst.form(2).evaluate(x) == doctest::Approx(g1 - 1.0));
  CHECK(inst.form(3).evaluate(x) == doctest::Approx(x[1] - x[0] - 0.25));
  CHECK(inst.lower()[1] == -1.0);
  CHECK(inst.upper()[0] == 2.0);
}

TEST_CASE("QPLIB: unsupported features are named") {
  std::string unbounded = kOneVar;
  unbounded.replace(unbounded.find("1.0          # default upper"), 3, "1e30");
  try {
    parse_qplib_subset(unbounded);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedFeature);
    CHECK(std::string(e.what()).find("unbounded") != std::string::npos);
  }
  std::string integer = kOneVar;
  integer.replace(integer.find("QCN"), 3, "QIN");
  try {
    parse_qplib_subset(integer);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedFeature);
    CHECK(std::string(e.what()).find("integer") != std::string::npos);
  }
}

TEST_CASE("QPLIB: truncated input is malformed") {
  std::string cut = kOneVar;
  cut.resize(cut.find("1.0E+30"));
  try {
    parse_qplib_subset(cut);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedInput);
  }
}

TEST_CASE("JSON round trips") {
  const auto parsed = parse_qplib_subset(kTwoRow);
  CHECK(read_json(to_json(parsed)) == parsed);
  const auto box_qp = generate_boxqcqp({.n = 6, .rho = 0.5, .num_qc = 0, .seed = 1});
  CHECK(read_json(to_json(box_qp)) == box_qp);
  const auto gen = generate_boxqcqp({.n = 9, .rho = 0.4, .num_qc = 3, .seed = 5});
  CHECK(read_json(to_json(gen)) == gen);
}

TEST_CASE("JSON preserves doubles exactly") {
  QuadraticForm obj{{{0, 1, 0.1}, {1, 1, 1.0 / 3.0}}, Eigen::Vector2d(std::nextafter(1.0, 2.0), -1e-300), M_PI};
  QcqpInstance inst("exact", 2, {obj}, Eigen::Vector2d(-0.7, 0.0), Eigen::Vector2d(1e10, 2.5));
  CHECK(read_json(to_json(inst)) == inst);
}

TEST_CASE("JSON rejects non-finite and mistyped coefficients") {
  const std::string good = to_json(generate_boxqcqp({.n = 2, .rho = 1.0, .num_qc = 0, .seed = 1}));
  auto with_bad_d = [&](const std::string& token) {
    std::string s = good;
    const auto pos = s.find("\"d\": ");
    const auto end = s.find_first_of(",\n}", pos);
    s.replace(pos + 5, end - pos - 5, token);
    return s;
  };
  for (const std::string tok : {"NaN", "null", "\"NaN\"", "Infinity", "\"3\""}) {
    try {
      read_json(with_bad_d(tok));
      FAIL("expected an error for " << tok);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SchemaViolation);
    }
  }
  try {
    read_json(std::string_view("{\"n\": 2,"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedInput);
  }
  try {
    read_json(std::string_view(R"({"n": 1, "objective": {"Q": [], "c": [0], "d": 0}, "constraints": [], "lower": [0]})"));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaViolation);
  }
}
