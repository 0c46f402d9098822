// Reader for the continuous part of the QPLIB text format:
//
//   name
//   three-letter code  (objective L/D/C/Q, variables C, constraints N/B/L/D/C/Q)
//   minimize | maximize
//   n
//   m                                  (constraint code not N/B)
//   #nnz, then "i j v" lower-triangle  (objective code not L)
//   default b, #nondefault, "i v"
//   objective constant
//   #nnz, then "k i j v"               (constraint code D/C/Q)
//   #nnz, then "k i v"                 (m > 0)
//   infinity
//   default lhs, #nondefault, "k v"    (m > 0)
//   default rhs, #nondefault, "k v"    (m > 0)
//   default lower, #nondefault, "i v"
//   default upper, #nondefault, "i v"
//
// Indices are 1-based. Objective and constraint bodies are 0.5 x'Qx + b'x.
// Anything after the bounds (starting points, names) is ignored.

#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "sparsecut/instance.hpp"

namespace sparsecut {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::vector<std::string> next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      for (char mark : {'#', '!', '%'}) {
        auto pos = line.find(mark);
        if (pos != std::string::npos) line.erase(pos);
      }
      std::istringstream ss(line);
      std::vector<std::string> toks;
      for (std::string t; ss >> t;) toks.push_back(t);
      if (!toks.empty()) return toks;
    }
    fail(fmt::format("unexpected end of input while reading {}", what));
  }

  double real(const std::string& tok, const char* what) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used == tok.size()) return v;
    } catch (const std::exception&) {
    }
    fail(fmt::format("expected a number for {}, got '{}'", what, tok));
  }

  long integer(const std::string& tok, const char* what) {
    const double v = real(tok, what);
    if (v != std::floor(v)) fail(fmt::format("expected an integer for {}, got '{}'", what, tok));
    return static_cast<long>(v);
  }

  std::vector<double> values(std::size_t count, const char* what) {
    auto toks = next(what);
    if (toks.size() < count) fail(fmt::format("{} needs {} fields", what, count));
    std::vector<double> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(real(toks[k], what));
    return out;
  }

  double scalar(const char* what) { return values(1, what)[0]; }
  long count(const char* what) {
    const long c = integer(next(what)[0], what);
    if (c < 0) fail(fmt::format("negative count for {}", what));
    return c;
  }

  int one_based(double v, long upper, const char* what) {
    if (v != std::floor(v) || v < 1 || v > static_cast<double>(upper))
      fail(fmt::format("index {} out of range for {}", v, what));
    return static_cast<int>(v) - 1;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::MalformedInput, fmt::format("qplib line {}: {}", line_no_, msg));
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

[[noreturn]] void unsupported(const std::string& feature) {
  throw Error(ErrorKind::UnsupportedFeature, "unsupported QPLIB feature: " + feature);
}

// Default value plus sparse overrides, as used for b, lhs, rhs and bounds.
std::vector<double> defaulted(LineReader& r, long size, const char* what) {
  std::vector<double> out(static_cast<std::size_t>(size), r.scalar(what));
  const long nd = r.count(what);
  for (long k = 0; k < nd; ++k) {
    const auto v = r.values(2, what);
    out[static_cast<std::size_t>(r.one_based(v[0], size, what))] = v[1];
  }
  return out;
}

}  // namespace

QcqpInstance parse_qplib_subset(std::istream& in) {
  LineReader r(in);
  const std::string name = r.next("name")[0];
  std::string code = r.next("problem type")[0];
  if (code.size() != 3) r.fail("problem type must have three letters");
  for (auto& ch : code) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  const char obj_code = code[0], var_code = code[1], con_code = code[2];
  if (std::string("LDCQ").find(obj_code) == std::string::npos) unsupported(fmt::format("objective type '{}'", obj_code));
  switch (var_code) {
    case 'C': break;
    case 'B': unsupported("binary variables");
    case 'I':
    case 'G': unsupported("integer variables");
    case 'M': unsupported("mixed-integer variables");
    default: unsupported(fmt::format("variable type '{}'", var_code));
  }
  if (std::string("NBLDCQ").find(con_code) == std::string::npos)
    unsupported(fmt::format("constraint type '{}'", con_code));

  std::string sense = r.next("objective sense")[0];
  for (auto& ch : sense) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (sense != "minimize" && sense != "maximize") r.fail("objective sense must be minimize or maximize");
  const double sign = sense == "maximize" ? -1.0 : 1.0;

  const long n = r.count("number of variables");
  if (n < 1) r.fail("need at least one variable");
  const bool has_rows = con_code != 'N' && con_code != 'B';
  const long m = has_rows ? r.count("number of constraints") : 0;

  QuadraticForm obj;
  if (obj_code != 'L') {
    const long nnz = r.count("objective quadratic terms");
    for (long k = 0; k < nnz; ++k) {
      const auto v = r.values(3, "objective quadratic term");
      obj.Q.push_back({r.one_based(v[0], n, "objective term"), r.one_based(v[1], n, "objective term"), sign * 0.5 * v[2]});
    }
  }
  const auto b0 = defaulted(r, n, "objective linear terms");
  obj.c = sign * Eigen::Map<const Eigen::VectorXd>(b0.data(), n);
  obj.d = sign * r.scalar("objective constant");

  std::vector<std::vector<Triplet>> row_q(static_cast<std::size_t>(m));
  std::vector<Eigen::VectorXd> row_b(static_cast<std::size_t>(m), Eigen::VectorXd::Zero(n));
  if (has_rows && con_code != 'L') {
    const long nnz = r.count("constraint quadratic terms");
    for (long k = 0; k < nnz; ++k) {
      const auto v = r.values(4, "constraint quadratic term");
      const int row = r.one_based(v[0], m, "constraint term");
      row_q[static_cast<std::size_t>(row)].push_back(
          {r.one_based(v[1], n, "constraint term"), r.one_based(v[2], n, "constraint term"), 0.5 * v[3]});
    }
  }
  if (has_rows) {
    const long nnz = r.count("constraint linear terms");
    for (long k = 0; k < nnz; ++k) {
      const auto v = r.values(3, "constraint linear term");
      row_b[static_cast<std::size_t>(r.one_based(v[0], m, "constraint term"))][r.one_based(v[1], n, "constraint term")] += v[2];
    }
  }
  const double infinity = r.scalar("infinity");
  auto infinite = [&](double v) { return std::abs(v) >= infinity; };

  std::vector<double> lhs, rhs;
  if (has_rows) {
    lhs = defaulted(r, m, "constraint lower sides");
    rhs = defaulted(r, m, "constraint upper sides");
  }
  const auto lower = defaulted(r, n, "variable lower bounds");
  const auto upper = defaulted(r, n, "variable upper bounds");
  for (long i = 0; i < n; ++i)
    if (infinite(lower[static_cast<std::size_t>(i)]) || infinite(upper[static_cast<std::size_t>(i)]))
      unsupported(fmt::format("unbounded variable x{}", i + 1));

  std::vector<QuadraticForm> forms{std::move(obj)};
  for (long k = 0; k < m; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    // c_l <= g(x) becomes -g(x) + c_l <= 0; g(x) <= c_u becomes g(x) - c_u <= 0.
    if (!infinite(lhs[uk])) {
      QuadraticForm f{row_q[uk], -row_b[uk], lhs[uk]};
      for (auto& t : f.Q) t.value = -t.value;
      forms.push_back(std::move(f));
    }
    if (!infinite(rhs[uk])) forms.push_back({row_q[uk], row_b[uk], -rhs[uk]});
  }
  return QcqpInstance(name, static_cast<int>(n), std::move(forms), Eigen::Map<const Eigen::VectorXd>(lower.data(), n),
                      Eigen::Map<const Eigen::VectorXd>(upper.data(), n));
}

QcqpInstance parse_qplib_subset(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_qplib_subset(in);
}

}  // namespace sparsecut
