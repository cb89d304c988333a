#pragma once

// Suite configuration and the orchestration behind the `verify` and
// `expconv` commands. Reports separate asserted theorem conclusions from
// observed diagnostics; only the former decide the exit status.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "possemi/expconv.hpp"
#include "possemi/lattice.hpp"
#include "possemi/operator_functions.hpp"
#include "possemi/semigroup.hpp"

namespace possemi {

enum ExitCode : int {
  kExitOk = 0,
  kExitAssertionFailed = 1,
  kExitHypothesisViolated = 2,
  kExitUsage = 64,
};

struct PSet {
  std::vector<double> p;
  FamilyKind kind = FamilyKind::F;
};

struct SuiteConfig {
  std::vector<Generator> generators;
  std::vector<OperatorFamily> families;
  std::vector<double> t_grid{0.1, 1.0, 10.0};
  std::vector<PSet> p_sets;
  std::size_t samples = 20;
  std::uint64_t seed = 0;
  OrderTolerance order_tol{};
  double psd_tol = 1e-8;
  std::filesystem::path output_dir = "out";
  /// Lets non-conservative generators through as negative controls.
  bool allow_nonconservative = false;
  bool coupled_lambda = false;
  /// Explicit test vector for expconv; sampled when absent.
  std::vector<double> f;
  /// Verbatim config, echoed into reports.
  nlohmann::json source;
};

/// Throws InvalidArgument (or a library error) for malformed configs.
/// Relative generator file references resolve against base_dir.
SuiteConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
SuiteConfig load_config(const std::filesystem::path& path);

struct SuiteOutcome {
  int exit_code = kExitOk;
  nlohmann::json report;
  std::string message;
  /// Filled by run_expconv, in report order.
  std::vector<LambdaGram> grams;
};

/// Lattice, semigroup, Jessen, adjoint and Gram suites.
SuiteOutcome run_verify(const SuiteConfig& cfg);
/// Gram matrices and PSD verdicts for every (generator, t, p-set).
SuiteOutcome run_expconv(const SuiteConfig& cfg);

/// Writes report.json (deterministic) and metadata.json (timestamp).
void write_report(const std::filesystem::path& dir, const std::string& name, const nlohmann::json& report);

}  // namespace possemi
