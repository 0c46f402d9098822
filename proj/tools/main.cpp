#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "bench.hpp"
#include "sparsecut/instance.hpp"

namespace fs = std::filesystem;
using namespace sparsecut;

namespace {

// Writes to --out when given, otherwise to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
    file_.open(path);
    if (!file_) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void write_svg(const std::string& path, const std::vector<Trace>& traces, const std::string& title) {
  if (path.empty()) return;
  std::vector<bench::Series> series;
  for (const auto& t : traces) {
    bench::Series s{short_name(t.strategy.kind), {}};
    for (const auto& r : t.iterations) s.values.push_back(r.gc);
    series.push_back(std::move(s));
  }
  Output out(path);
  bench::write_gc_svg(series, title, out.stream());
}

struct Common {
  double time_limit = 60.0;
  double gc_target = 0.99;
  int max_iters = 1000;
  double alpha = 0.001;
  std::string cone = "auto";
  std::string backend = "ipm";
  std::string out;

  DriverLimits limits() const {
    if (!(time_limit > 0)) throw Error(ErrorKind::InvalidArgument, "--time-limit must be positive");
    if (max_iters < 0) throw Error(ErrorKind::InvalidArgument, "--max-iters must be nonnegative");
    return {time_limit, max_iters, gc_target};
  }
};

void add_common(CLI::App* cmd, Common& c, bool loop_flags) {
  cmd->add_option("--time-limit", c.time_limit, "Time limit in seconds")->capture_default_str();
  cmd->add_option("--cone", c.cone, "Cone for sparse cuts")->check(CLI::IsMember({"epsd", "ednn", "auto"}))->capture_default_str();
  cmd->add_option("--backend", c.backend, "Conic backend")->capture_default_str();
  cmd->add_option("--out", c.out, "Output file (default stdout)");
  if (loop_flags) {
    cmd->add_option("--gc-target", c.gc_target, "Stop once GC reaches this value (inf: run to no violated cut)")->capture_default_str();
    cmd->add_option("--max-iters", c.max_iters, "Separation round limit")->capture_default_str();
    cmd->add_option("--alpha", c.alpha, "Blend weight of the LP point in sdp-sparse")->capture_default_str();
  }
}

bool numerical_status(const std::string& status) { return status == "numerical"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse PSD/DNN cutting planes for box-constrained QCQPs"};
  app.require_subcommand(1);

  GeneratorConfig gen;
  std::string gen_dir = ".";
  auto* generate = app.add_subcommand("generate", "Write a random sparse instance as JSON");
  generate->add_option("--n", gen.n, "Number of variables")->required();
  generate->add_option("--rho", gen.rho, "Objective density in (0, 1]")->required();
  generate->add_option("--qc", gen.num_qc, "Number of quadratic constraints")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  generate->add_option("--qc-support", gen.constraint_support_fraction,
                       "Fraction of the objective pattern used by each constraint")->capture_default_str();
  generate->add_option("--out", gen_dir, "Output directory")->capture_default_str();

  Common common;
  std::vector<std::string> inputs;
  std::string mccormick = "E";
  auto* solve_sdp = app.add_subcommand("solve-sdp", "Shor SDP (or DNN) bound");
  solve_sdp->add_option("instances", inputs, "Instance files or directories")->required();
  solve_sdp->add_option("--mccormick", mccormick, "Envelope rows added to the SDP")->check(CLI::IsMember({"off", "E", "full"}))->capture_default_str();
  add_common(solve_sdp, common, false);

  std::string strategy = "sparse", cuts_path, svg_path;
  auto* cut_loop = app.add_subcommand("cut-loop", "Run one cutting-plane strategy and emit its trace");
  cut_loop->add_option("instance", inputs, "Instance file")->required()->expected(1);
  cut_loop->add_option("--strategy", strategy, "dense-mcc, dense, sparse or sdp-sparse")->capture_default_str();
  cut_loop->add_option("--cuts", cuts_path, "Write the final cut pool as JSON");
  cut_loop->add_option("--svg", svg_path, "Write a GC chart");
  add_common(cut_loop, common, true);

  bool sequential = false;
  auto* compare = app.add_subcommand("compare", "All four strategies side by side");
  compare->add_option("instances", inputs, "Instance files or directories")->required();
  compare->add_option("--svg", svg_path, "Write a GC chart (single instance)");
  compare->add_flag("--sequential", sequential, "Run strategies one after another");
  add_common(compare, common, true);

  bool with_cuts = false, no_cuts = false, purge = false;
  double eps_rel = 1e-4;
  long node_limit = 100000;
  auto* bnb = app.add_subcommand("bnb", "Spatial branch-and-bound with or without exported cuts");
  bnb->add_option("instances", inputs, "Instance files or directories")->required();
  auto* wc = bnb->add_flag("--with-cuts", with_cuts, "Add sparse cuts from a cut loop (default)");
  bnb->add_flag("--no-cuts", no_cuts, "McCormick node relaxations only")->excludes(wc);
  bnb->add_option("--cuts", cuts_path, "Use this cut pool instead of running the cut loop")->excludes("--no-cuts");
  bnb->add_flag("--purge", purge, "Drop cuts slack at the final LP before branching");
  bnb->add_option("--eps", eps_rel, "Relative optimality gap")->capture_default_str();
  bnb->add_option("--node-limit", node_limit, "Node limit")->capture_default_str();
  add_common(bnb, common, true);

  std::vector<std::string> csvs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Average compare or bnb CSVs into a summary table");
  report->add_option("csv", csvs, "CSV files")->required();
  report->add_option("--out", report_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    BackendPtr backend;
    if (!generate->parsed() && !report->parsed()) backend = make_backend(common.backend);
    DriverOptions dopts;
    dopts.backend = backend.get();

    if (generate->parsed()) {
      gen.validate();
      const auto inst = generate_boxqcqp(gen);
      fs::create_directories(gen_dir);
      const auto path = fs::path(gen_dir) / (inst.name() + ".json");
      save_json(inst, path);
      std::cout << path.string() << '\n';
      return 0;
    }

    if (solve_sdp->parsed()) {
      Output out(common.out);
      out.stream() << "instance,relaxation,mccormick,z,status,t\n";
      bool failed = false;
      for (const auto& p : bench::expand_inputs(inputs)) {
        const auto inst = load_instance(p);
        const auto cone = parse_cone_mode(common.cone);
        const bool dnn = effective_cut_mode({StrategyKind::SparseCuts, cone}, inst) == CutMode::EDNN;
        const auto prob = build_shor_sdp(inst, {.mccormick = parse_mccormick_mode(mccormick), .dnn = dnn});
        SolveLimits sl;
        sl.time_limit = common.time_limit;
        const auto r = solve_conic(prob, sl, backend.get());
        failed |= r.status == SolveStatus::NumericalError;
        fmt::print(out.stream(), "{},{},{},{:.10g},{},{:.6f}\n", inst.name(), dnn ? "dnn" : "shor", mccormick, r.objective,
                   to_string(r.status), r.solve_time);
      }
      return failed ? 2 : 0;
    }

    if (cut_loop->parsed()) {
      const auto inst = load_instance(inputs.front());
      const Strategy s{parse_strategy(strategy), parse_cone_mode(common.cone), common.alpha};
      const auto trace = run_cutting_plane(inst, s, common.limits(), dopts);
      Output out(common.out);
      write_trace_csv(trace, out.stream());
      if (!cuts_path.empty()) {
        Output pool(cuts_path);
        write_cut_pool(trace.cuts, pool.stream());
      }
      write_svg(svg_path, {trace}, inst.name());
      fmt::print(std::cerr, "{} {} status={} iter={} cuts={} GC={:.6f}\n", inst.name(), short_name(s.kind), trace.status,
                 trace.separation_rounds(), trace.cuts.size(), trace.final_gc);
      return numerical_status(trace.status) ? 2 : 0;
    }

    if (compare->parsed()) {
      bench::CompareSettings cs{common.limits(), dopts, parse_cone_mode(common.cone), common.alpha, !sequential};
      if (!(cs.alpha > 0.0 && cs.alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "--alpha must lie in (0, 1)");
      const auto files = bench::expand_inputs(inputs);
      Output out(common.out);
      out.stream() << bench::kCompareHeader << '\n';
      int kept = 0;
      bool failed = false;
      for (const auto& p : files) {
        const auto inst = load_instance(p);
        const auto traces = bench::compare_strategies(inst, cs);
        if (std::isnan(traces.front().final_gc)) {
          fmt::print(std::cerr, "{}: SDP bound equals the McCormick bound, instance excluded\n", inst.name());
          continue;
        }
        ++kept;
        for (const auto& t : traces) {
          bench::write_compare_row(t, out.stream());
          failed |= numerical_status(t.status);
        }
        if (files.size() == 1) write_svg(svg_path, traces, inst.name());
      }
      if (kept == 0) throw Error(ErrorKind::DegenerateGap, "every instance has z_sdp == z_mcc");
      return failed ? 2 : 0;
    }

    if (bnb->parsed()) {
      bench::BnbSettings bs;
      bs.with_cuts = !no_cuts;
      bs.cut_limits = common.limits();
      bs.cone = parse_cone_mode(common.cone);
      bs.purge = purge;
      bs.global = {eps_rel, node_limit, common.time_limit, backend.get()};
      bs.backend = backend.get();
      Output out(common.out);
      out.stream() << bench::kBnbHeader << '\n';
      bool failed = false;
      for (const auto& p : bench::expand_inputs(inputs)) {
        const auto inst = load_instance(p);
        std::vector<Cut> pool;
        if (!cuts_path.empty()) {
          std::ifstream in(cuts_path);
          if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read " + cuts_path);
          pool = read_cut_pool(in, build_support_set(inst));
        }
        const auto row = bench::run_bnb(inst, bs, cuts_path.empty() ? nullptr : &pool);
        bench::write_bnb_row(row, out.stream());
        failed |= numerical_status(row.result.status);
      }
      return failed ? 2 : 0;
    }

    if (report->parsed()) {
      std::vector<fs::path> paths(csvs.begin(), csvs.end());
      Output out(report_out);
      bench::write_report(paths, out.stream());
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.kind() == ErrorKind::Numerical) return 2;
    std::cerr << "Run with --help for more information.\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for more information.\n";
    return 1;
  }
  return 1;
}
