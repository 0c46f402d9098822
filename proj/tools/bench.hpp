#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparsecut/driver.hpp"
#include "sparsecut/global.hpp"

namespace sparsecut::bench {

/// Instance files named on the command line; directories expand to their
/// .json and .qplib entries in lexicographic order.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::string>& args);

struct CompareSettings {
  DriverLimits limits;
  DriverOptions options;
  ConeMode cone = ConeMode::Auto;
  double alpha = 0.001;
  /// Run the four strategies on separate threads.
  bool parallel = true;
};

/// All four strategies on one instance, in kAllStrategies order. Reference
/// bounds are computed once and shared.
std::vector<Trace> compare_strategies(const QcqpInstance& instance, const CompareSettings& settings);

/// Timing columns come last: t_lastlp, t_SDP, t_total.
inline constexpr const char* kCompareHeader =
    "instance,strategy,cone,iter,cuts,GC,z_lp,z_mcc,z_ref,columns,fallbacks,status,t_lastlp,t_SDP,t_total";
void write_compare_row(const Trace& trace, std::ostream& out);

struct BnbSettings {
  bool with_cuts = true;
  /// Cut loop used to build the exported pool.
  DriverLimits cut_limits;
  ConeMode cone = ConeMode::Auto;
  bool purge = false;
  GlobalOptions global;
  const ConicBackend* backend = nullptr;
};

struct BnbRow {
  std::string instance;
  std::string mode;
  GlobalResult result;
  double z_mcc = 0.0;
  double z_sdp = 0.0;
  double t_sdp = 0.0;
  double z_cuts = 0.0;
  double t_cuts = 0.0;
  int cuts = 0;
};

/// B&B with or without exported cuts; `pool`, when non-null, replaces the cut loop.
BnbRow run_bnb(const QcqpInstance& instance, const BnbSettings& settings, const std::vector<Cut>* pool = nullptr);

/// Gap closed relative to the global optimum; NaN when the McCormick bound is already tight.
double gc_vs_optimum(double z, double z_mcc, double z_qp);

inline constexpr const char* kBnbHeader =
    "instance,mode,z_best,bound,status,GC_ro,nodes,GC,GC_sdp,cuts,GC_cuts,t,t_SDP,t_cuts";
void write_bnb_row(const BnbRow& row, std::ostream& out);

/// Averages compare or bnb CSVs (detected by header) into one summary table.
void write_report(const std::vector<std::filesystem::path>& csvs, std::ostream& out);

struct Series {
  std::string label;
  std::vector<double> values;
};

/// GC per iteration as a line chart; values are clamped to [0, 1] for display.
void write_gc_svg(const std::vector<Series>& series, const std::string& title, std::ostream& out);

}  // namespace sparsecut::bench
