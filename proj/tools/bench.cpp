#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sparsecut/instance.hpp"

namespace sparsecut::bench {

namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double v) { return std::isfinite(v) ? fmt::format("{:.10g}", v) : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); }
std::string ratio(double v) { return std::isnan(v) ? "nan" : fmt::format("{:.6f}", v); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::MalformedInput, "not a number in CSV: '" + s + "'");
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorKind::SchemaViolation, "missing CSV column " + name);
    return static_cast<int>(it - header.begin());
  }
};

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::MalformedInput, path.string() + " is empty");
  t.header = split_csv(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != t.header.size())
      throw Error(ErrorKind::MalformedInput, fmt::format("{}: row has {} cells, header {}", path.string(), cells.size(), t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

// Mean over finite values; GC-like columns are clamped to [0, 1] first.
struct Mean {
  double sum = 0.0;
  int count = 0;
  void add(double v, bool clamp) {
    if (!std::isfinite(v)) return;
    sum += clamp ? std::clamp(v, 0.0, 1.0) : v;
    ++count;
  }
  double value() const { return count ? sum / count : std::numeric_limits<double>::quiet_NaN(); }
};

void aggregate(const std::vector<Table>& tables, const std::string& key, const std::vector<std::string>& columns,
               std::ostream& out) {
  std::vector<std::string> order;
  std::map<std::string, std::map<std::string, Mean>> acc;
  std::map<std::string, int> rows;
  for (const auto& t : tables) {
    const int k = t.column(key);
    for (const auto& r : t.rows) {
      if (!acc.contains(r[k])) order.push_back(r[k]);
      ++rows[r[k]];
      for (const auto& c : columns) acc[r[k]][c].add(parse_number(r[t.column(c)]), c.starts_with("GC"));
    }
  }
  out << key << ",instances";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (const auto& name : order) {
    out << name << ',' << rows[name];
    for (const auto& c : columns) out << ',' << (c.starts_with("GC") ? ratio(acc[name][c].value()) : num(acc[name][c].value()));
    out << '\n';
  }
}

}  // namespace

std::vector<fs::path> expand_inputs(const std::vector<std::string>& args) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    const fs::path p(a);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file() && (entry.path().extension() == ".json" || entry.path().extension() == ".qplib"))
          found.push_back(entry.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      out.push_back(p);
    } else {
      throw Error(ErrorKind::InvalidArgument, "no such instance file or directory: " + a);
    }
  }
  return out;
}

std::vector<Trace> compare_strategies(const QcqpInstance& inst, const CompareSettings& s) {
  const ReferenceBounds sdp = compute_reference(inst, false, s.options.backend);
  ReferenceBounds dnn;
  const bool need_dnn = effective_cut_mode({StrategyKind::SparseCuts, s.cone}, inst) == CutMode::EDNN;
  if (need_dnn) dnn = compute_reference(inst, true, s.options.backend);

  auto run = [&](StrategyKind kind) {
    const Strategy strategy{kind, s.cone, s.alpha};
    const bool uses_dnn = effective_cut_mode(strategy, inst) == CutMode::EDNN;
    return run_cutting_plane(inst, strategy, s.limits, s.options, uses_dnn ? &dnn : &sdp);
  };
  std::vector<Trace> traces;
  if (s.parallel) {
    std::vector<std::future<Trace>> jobs;
    for (auto k : kAllStrategies) jobs.push_back(std::async(std::launch::async, run, k));
    for (auto& j : jobs) traces.push_back(j.get());
  } else {
    for (auto k : kAllStrategies) traces.push_back(run(k));
  }
  return traces;
}

void write_compare_row(const Trace& t, std::ostream& out) {
  fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{:.6f},{:.6f},{:.6f}\n", t.instance, short_name(t.strategy.kind),
             to_string(t.cut_mode), t.separation_rounds(), t.cuts.size(), ratio(t.final_gc), num(t.z_lp), num(t.z_mcc),
             num(t.z_ref), t.lp_columns, t.fallbacks, t.status, t.t_lastlp, t.t_sdp, t.total_time);
}

double gc_vs_optimum(double z, double z_mcc, double z_qp) {
  if (!gap_is_defined(z_mcc, z_qp)) return std::numeric_limits<double>::quiet_NaN();
  return (z - z_mcc) / (z_qp - z_mcc);
}

BnbRow run_bnb(const QcqpInstance& inst, const BnbSettings& s, const std::vector<Cut>* pool) {
  BnbRow row;
  row.instance = inst.name();
  row.mode = s.with_cuts ? "with-cuts" : "no-cuts";
  const ReferenceBounds ref = compute_reference(inst, false, s.backend);
  row.z_mcc = ref.z_mcc;
  row.z_sdp = ref.z_ref;
  row.t_sdp = ref.t_ref;
  row.z_cuts = ref.z_mcc;
  std::vector<Cut> cuts;
  if (s.with_cuts) {
    const auto start = std::chrono::steady_clock::now();
    if (pool) {
      cuts = *pool;
    } else {
      DriverOptions opts;
      opts.backend = s.backend;
      const Strategy strategy{StrategyKind::SparseCuts, s.cone};
      const bool dnn = effective_cut_mode(strategy, inst) == CutMode::EDNN;
      const ReferenceBounds dref = dnn ? compute_reference(inst, true, s.backend) : ReferenceBounds{};
      auto trace = run_cutting_plane(inst, strategy, s.cut_limits, opts, dnn ? &dref : &ref);
      cuts = std::move(trace.cuts);
    }
    if (s.purge) cuts = purge_slack_cuts(inst, cuts, 1e-6, s.backend);
    if (!cuts.empty()) {
      const auto r = solve_conic(build_e_lp(inst, cuts, McCormickMode::E), {}, s.backend);
      if (!r.optimal()) throw Error(ErrorKind::Numerical, "LP with exported cuts did not solve");
      row.z_cuts = r.objective;
    }
    row.t_cuts = seconds_since(start);
  }
  row.cuts = static_cast<int>(cuts.size());
  GlobalOptions g = s.global;
  if (!g.backend) g.backend = s.backend;
  row.result = solve_global(inst, cuts, g);
  return row;
}

void write_bnb_row(const BnbRow& row, std::ostream& out) {
  const auto& r = row.result;
  const double zq = r.z_best;
  fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{:.6f},{:.6f},{:.6f}\n", row.instance, row.mode, num(zq), num(r.bound),
             r.status, ratio(gc_vs_optimum(r.root_bound, row.z_mcc, zq)), r.nodes, ratio(gc_vs_optimum(r.bound, row.z_mcc, zq)),
             ratio(gc_vs_optimum(row.z_sdp, row.z_mcc, zq)), row.cuts, ratio(gc_vs_optimum(row.z_cuts, row.z_mcc, zq)), r.time,
             row.t_sdp, row.t_cuts);
}

void write_report(const std::vector<fs::path>& csvs, std::ostream& out) {
  if (csvs.empty()) throw Error(ErrorKind::InvalidArgument, "report needs at least one CSV");
  std::vector<Table> tables;
  for (const auto& p : csvs) tables.push_back(read_csv(p));
  const auto& h = tables.front().header;
  for (const auto& t : tables)
    if (t.header != h) throw Error(ErrorKind::SchemaViolation, "report inputs mix different CSV layouts");
  if (std::find(h.begin(), h.end(), "strategy") != h.end()) {
    aggregate(tables, "strategy", {"iter", "cuts", "GC", "t_lastlp", "t_SDP"}, out);
  } else if (std::find(h.begin(), h.end(), "mode") != h.end()) {
    aggregate(tables, "mode", {"GC_ro", "nodes", "GC", "t", "t_SDP", "GC_sdp", "t_cuts", "cuts", "GC_cuts"}, out);
  } else {
    throw Error(ErrorKind::SchemaViolation, "unrecognised CSV layout (expected compare or bnb output)");
  }
}

void write_gc_svg(const std::vector<Series>& series, const std::string& title, std::ostream& out) {
  constexpr double W = 640, H = 400, L = 60, R = 170, T = 40, B = 50;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::size_t longest = 2;
  for (const auto& s : series) longest = std::max(longest, s.values.size());
  const double xmax = static_cast<double>(longest - 1);
  auto px = [&](double i) { return L + (W - L - R) * i / xmax; };
  auto py = [&](double v) { return H - B - (H - T - B) * std::clamp(v, 0.0, 1.0); };

  fmt::print(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"12\">\n", W, H);
  fmt::print(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  fmt::print(out, "<text x=\"{}\" y=\"22\" font-size=\"14\">{}</text>\n", L, title);
  fmt::print(out, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", L, H - B, W - R);
  fmt::print(out, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", L, T, H - B);
  for (double g : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    fmt::print(out, "<line x1=\"{0}\" y1=\"{1:.1f}\" x2=\"{2}\" y2=\"{1:.1f}\" stroke=\"#ddd\"/>\n", L, py(g), W - R);
    fmt::print(out, "<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.2f}</text>\n", L - 6, py(g) + 4, g);
  }
  fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">iteration (0..{})</text>\n", (L + W - R) / 2, H - 15, longest - 1);
  fmt::print(out, "<text x=\"15\" y=\"{}\" transform=\"rotate(-90 15 {})\" text-anchor=\"middle\">GC</text>\n", (T + H - B) / 2, (T + H - B) / 2);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < series[k].values.size(); ++i) {
      if (!std::isfinite(series[k].values[i])) continue;
      pts += fmt::format("{:.1f},{:.1f} ", px(static_cast<double>(i)), py(series[k].values[i]));
    }
    fmt::print(out, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, pts);
    const double ly = T + 18.0 * static_cast<double>(k);
    fmt::print(out, "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n", W - R + 10, ly, W - R + 30, color);
    fmt::print(out, "<text x=\"{}\" y=\"{}\">{}</text>\n", W - R + 36, ly + 4, series[k].label);
  }
  out << "</svg>\n";
}

}  // namespace sparsecut::bench
