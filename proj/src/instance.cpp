#include "sparsecut/instance.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace sparsecut {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// std::uniform_int_distribution is implementation-defined; this is not.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t v;
    do v = engine_(); while (v >= limit);
    return lo + static_cast<std::int64_t>(v % range);
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

void GeneratorConfig::validate() const {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "generator needs n >= 2");
  if (!(rho > 0.0 && rho <= 1.0)) throw Error(ErrorKind::InvalidArgument, "density must lie in (0, 1]");
  if (num_qc < 0) throw Error(ErrorKind::InvalidArgument, "constraint count must be nonnegative");
  if (coeff_lo > coeff_hi || (coeff_lo == 0 && coeff_hi == 0))
    throw Error(ErrorKind::InvalidArgument, "empty coefficient range");
  if (!(constraint_support_fraction > 0.0 && constraint_support_fraction <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "constraint support fraction must lie in (0, 1]");
}

std::string instance_name(const GeneratorConfig& cfg) {
  return fmt::format("spar{:03d}-{:03d}-{}_{}qc", cfg.n, static_cast<int>(std::lround(cfg.rho * 100.0)), cfg.seed,
                     cfg.num_qc);
}

std::uint64_t derive_seed(const GeneratorConfig& cfg, std::uint64_t stream) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(cfg.n));
  h = splitmix64(h ^ static_cast<std::uint64_t>(std::llround(cfg.rho * 1e6)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(cfg.num_qc));
  h = splitmix64(h ^ cfg.seed);
  return splitmix64(h ^ stream);
}

QcqpInstance generate_boxqcqp(const GeneratorConfig& cfg) {
  cfg.validate();
  PortableRng structure(derive_seed(cfg, 1));
  PortableRng coeffs(derive_seed(cfg, 2));
  const int n = cfg.n;

  std::vector<std::pair<int, int>> support;
  for (int i = 0; i < n; ++i) {
    support.emplace_back(i, i);
    for (int j = i + 1; j < n; ++j)
      if (structure.unit() < cfg.rho) support.emplace_back(i, j);
  }

  auto draw = [&] { return static_cast<double>(coeffs.integer(cfg.coeff_lo, cfg.coeff_hi)); };
  auto draw_nonzero = [&] {
    double v;
    do v = draw(); while (v == 0.0);
    return v;
  };

  std::vector<QuadraticForm> forms;
  QuadraticForm obj;
  for (const auto& [i, j] : support) obj.Q.push_back({i, j, i == j ? draw() : draw_nonzero()});
  obj.c = Eigen::VectorXd(n);
  for (int i = 0; i < n; ++i) obj.c[i] = draw();
  forms.push_back(std::move(obj));

  const Eigen::VectorXd half = Eigen::VectorXd::Constant(n, 0.5);
  for (int k = 0; k < cfg.num_qc; ++k) {
    QuadraticForm con;
    for (const auto& [i, j] : support)
      if (cfg.constraint_support_fraction >= 1.0 || structure.unit() < cfg.constraint_support_fraction)
        con.Q.push_back({i, j, draw()});
    con.c = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) con.c[i] = draw();
    // Integer data at x = 0.5 gives a multiple of 1/4, so d is exact and the
    // constraint evaluates to exactly zero there.
    con.d = -con.evaluate(half);
    forms.push_back(std::move(con));
  }
  return QcqpInstance(instance_name(cfg), n, std::move(forms), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using ojson = nlohmann::ordered_json;

ojson form_to_json(const QuadraticForm& f) {
  ojson q = ojson::array();
  for (const auto& t : f.Q) q.push_back({t.i, t.j, t.value});
  return ojson{{"Q", q}, {"c", std::vector<double>(f.c.data(), f.c.data() + f.c.size())}, {"d", f.d}};
}

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaViolation, what); }

const nlohmann::json& field(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object()) schema(fmt::format("expected an object holding '{}'", key));
  auto it = obj.find(key);
  if (it == obj.end()) schema(fmt::format("missing field '{}'", key));
  return *it;
}

double number(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) schema(fmt::format("{}: expected a finite number, got {}", where, v.dump()));
  const double x = v.get<double>();
  if (!std::isfinite(x)) schema(fmt::format("{}: non-finite coefficient", where));
  return x;
}

int index(const nlohmann::json& v, int n, const std::string& where) {
  if (!v.is_number_integer()) schema(where + ": expected an integer index");
  const auto i = v.get<std::int64_t>();
  if (i < 0 || i >= n) schema(fmt::format("{}: index {} out of range", where, i));
  return static_cast<int>(i);
}

Eigen::VectorXd vector(const nlohmann::json& v, int n, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) schema(fmt::format("{}: expected an array of length {}", where, n));
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = number(v[static_cast<std::size_t>(i)], where);
  return out;
}

QuadraticForm form_from_json(const nlohmann::json& j, int n, const std::string& where) {
  QuadraticForm f;
  const auto& q = field(j, "Q");
  if (!q.is_array()) schema(where + ".Q: expected an array");
  for (const auto& t : q) {
    if (!t.is_array() || t.size() != 3) schema(where + ".Q: expected [i, j, value] triplets");
    const int i = index(t[0], n, where + ".Q");
    const int k = index(t[1], n, where + ".Q");
    if (i > k) schema(where + ".Q: triplets must satisfy i <= j");
    f.Q.push_back({i, k, number(t[2], where + ".Q")});
  }
  f.c = vector(field(j, "c"), n, where + ".c");
  f.d = number(field(j, "d"), where + ".d");
  return f;
}

}  // namespace

void write_json(const QcqpInstance& inst, std::ostream& out) {
  ojson j;
  j["name"] = inst.name();
  j["n"] = inst.n();
  j["m"] = inst.m();
  j["objective"] = form_to_json(inst.objective());
  ojson cons = ojson::array();
  for (int k = 1; k <= inst.m(); ++k) cons.push_back(form_to_json(inst.form(k)));
  j["constraints"] = cons;
  j["lower"] = std::vector<double>(inst.lower().data(), inst.lower().data() + inst.n());
  j["upper"] = std::vector<double>(inst.upper().data(), inst.upper().data() + inst.n());
  out << j.dump(1) << '\n';
}

std::string to_json(const QcqpInstance& inst) {
  std::ostringstream os;
  write_json(inst, os);
  return os.str();
}

QcqpInstance read_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Bare NaN/Infinity tokens are not JSON, but they are a data problem, not a syntax one.
    static const std::regex non_finite(R"([:\[,]\s*[-+]?(NaN|nan|Infinity|inf)\b)");
    const std::string s(text);
    if (std::regex_search(s, non_finite)) schema("non-finite coefficient");
    throw Error(ErrorKind::MalformedInput, std::string("malformed JSON: ") + e.what());
  }
  const auto& nj = field(j, "n");
  if (!nj.is_number_integer() || nj.get<std::int64_t>() < 1) schema("n: expected a positive integer");
  const int n = nj.get<int>();
  std::string name;
  if (j.contains("name")) {
    if (!j["name"].is_string()) schema("name: expected a string");
    name = j["name"].get<std::string>();
  }
  std::vector<QuadraticForm> forms{form_from_json(field(j, "objective"), n, "objective")};
  const auto& cons = field(j, "constraints");
  if (!cons.is_array()) schema("constraints: expected an array");
  for (std::size_t k = 0; k < cons.size(); ++k) forms.push_back(form_from_json(cons[k], n, fmt::format("constraints[{}]", k)));
  if (j.contains("m") && (!j["m"].is_number_integer() || j["m"].get<std::int64_t>() != static_cast<std::int64_t>(cons.size())))
    schema("m does not match the number of constraints");
  return QcqpInstance(name, n, std::move(forms), vector(field(j, "lower"), n, "lower"), vector(field(j, "upper"), n, "upper"));
}

QcqpInstance read_json(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  return read_json(buf.str());
}

QcqpInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open " + path.string());
  if (path.extension() == ".qplib") return parse_qplib_subset(in);
  return read_json(in);
}

void save_json(const QcqpInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  write_json(instance, out);
}

}  // namespace sparsecut
