#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "sparsecut/model.hpp"

namespace sparsecut {

/// Random box-constrained QCQP with x in [0,1]^n.
struct GeneratorConfig {
  int n = 10;
  /// Probability that a strict upper-triangular objective entry is nonzero.
  double rho = 0.5;
  /// Number of quadratic constraints.
  int num_qc = 0;
  /// Instance index; together with (n, rho, num_qc) it determines the RNG streams.
  std::uint64_t seed = 1;
  int coeff_lo = -50;
  int coeff_hi = 50;
  /// Fraction of objective-support entries that receive a constraint coefficient.
  /// 1 samples every entry.
  double constraint_support_fraction = 1.0;

  void validate() const;
};

/// "spar<n>-<100 rho>-<seed>_<k>qc", e.g. spar020-010-3_5qc.
std::string instance_name(const GeneratorConfig& cfg);

/// 64-bit stream seed derived from (n, rho, num_qc, seed) by SplitMix64 chaining.
std::uint64_t derive_seed(const GeneratorConfig& cfg, std::uint64_t stream);

QcqpInstance generate_boxqcqp(const GeneratorConfig& cfg);

/// Continuous QCQP fragment of the QPLIB text format.
QcqpInstance parse_qplib_subset(std::istream& in);
QcqpInstance parse_qplib_subset(std::string_view text);

void write_json(const QcqpInstance& instance, std::ostream& out);
std::string to_json(const QcqpInstance& instance);
QcqpInstance read_json(std::istream& in);
QcqpInstance read_json(std::string_view text);

/// Reads .json or .qplib files (by extension).
QcqpInstance load_instance(const std::filesystem::path& path);
void save_json(const QcqpInstance& instance, const std::filesystem::path& path);

}  // namespace sparsecut
