// possemi: command-line front end.
//
//   possemi verify  <config.json>
//   possemi expconv <config.json>
//   possemi figure 1a --t 1.0 [--L 6 --h 0.05]
//   possemi figure 1b --k 90 [--n 360]
//
// Output directory precedence: --output-dir, then $POSSEMI_OUTPUT_DIR, then
// the config's output_dir (default "out").
//
// Exit codes: 0 all asserted checks pass, 1 assertion failure, 2 theorem
// hypothesis violated, 64 usage or config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "possemi/errors.hpp"
#include "possemi/examples_repro.hpp"
#include "possemi/expconv.hpp"
#include "possemi/suite.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve_output_dir(const std::string& flag, const fs::path& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("POSSEMI_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return fallback;
}

std::string suffix_for(const std::string& base, std::size_t count, const std::string& tag) {
  return count > 1 ? base + "_" + tag : base;
}

int run_suite_command(const std::string& command, const std::string& config_path, const std::string& out_flag) {
  possemi::SuiteConfig cfg = possemi::load_config(config_path);
  const fs::path dir = resolve_output_dir(out_flag, cfg.output_dir);
  const auto outcome = command == "verify" ? possemi::run_verify(cfg) : possemi::run_expconv(cfg);

  if (outcome.exit_code == possemi::kExitHypothesisViolated) {
    std::cerr << "possemi " << command << ": hypothesis violated: " << outcome.message << '\n';
    return outcome.exit_code;
  }
  if (command == "verify") {
    possemi::write_report(dir, "report.json", outcome.report);
  } else {
    possemi::write_report(dir, "gram.json", outcome.report);
    std::ofstream table(dir / "min_eigenvalues.csv");
    table.precision(17);
    table << "generator,t,p,coordinate,min_eig\n";
    for (const auto& row : outcome.report["min_eigenvalues"]) {
      std::string p;
      for (const auto& v : row["p"]) p += (p.empty() ? "" : " ") + v.dump();
      table << row["generator"].get<std::string>() << ',' << row["t"].get<double>() << ',' << p << ','
            << row["coordinate"].get<std::size_t>() << ',' << row["min_eig"].get<double>() << '\n';
    }
    for (std::size_t i = 0; i < outcome.grams.size(); ++i) {
      std::ofstream csv(dir / ("gram_" + std::to_string(i) + ".csv"));
      possemi::write_gram_csv(csv, outcome.grams[i]);
    }
  }
  std::cout << command << ": " << outcome.message << " (" << (dir / (command == "verify" ? "report.json" : "gram.json")).string()
            << ")\n";
  return outcome.exit_code;
}

template <typename Report>
void emit_figure(const fs::path& dir, const std::string& stem, const Report& report, const std::string& title) {
  fs::create_directories(dir);
  std::ofstream csv(dir / (stem + ".csv"));
  possemi::write_curves_csv(csv, report.curves);
  std::ofstream svg(dir / (stem + ".svg"));
  possemi::write_curves_svg(svg, report.curves, title);
  std::ofstream js(dir / (stem + ".json"));
  js << json(report).dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jessen-type inequalities and exponential convexity for positive semigroups"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_flag;
  app.add_option("--output-dir", out_flag, "Directory for reports and figures");

  std::string verify_config;
  auto* verify = app.add_subcommand("verify", "Run the full verification suite from a JSON config");
  verify->add_option("config", verify_config, "Suite config JSON")->required();

  std::string expconv_config;
  auto* expconv = app.add_subcommand("expconv", "Build Lambda Gram matrices and test order-PSD");
  expconv->add_option("config", expconv_config, "Suite config JSON")->required();

  std::string which;
  std::vector<double> shift_t{1.0};
  double half_width = 6.0;
  double step = 0.05;
  std::vector<long> rot_k{90};
  std::size_t rot_n = 360;
  auto* figure = app.add_subcommand("figure", "Reproduce the shift (1a) or rotation (1b) counterexample");
  figure->set_help_flag("--help", "Print this help message and exit");
  figure->add_option("which", which, "1a or 1b")->required()->check(CLI::IsMember({"1a", "1b"}));
  figure->add_option("--t", shift_t, "Shift amounts (1a)");
  figure->add_option("--L", half_width, "Grid half-width (1a)");
  figure->add_option("--h", step, "Grid step (1a)");
  figure->add_option("--k", rot_k, "Rotation steps (1b)");
  figure->add_option("--n", rot_n, "Circle points (1b)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return possemi::kExitUsage;
  }

  try {
    if (*verify) return run_suite_command("verify", verify_config, out_flag);
    if (*expconv) return run_suite_command("expconv", expconv_config, out_flag);

    const fs::path dir = resolve_output_dir(out_flag, "out");
    if (which == "1a") {
      for (double t : shift_t) {
        const auto report = possemi::run_shift_example(possemi::ShiftScene(t, half_width, step));
        std::ostringstream tag;
        tag << "t" << t;
        emit_figure(dir, suffix_for("figure1a", shift_t.size(), tag.str()), report,
                    "Shift example, t = " + tag.str().substr(1));
        std::cout << "figure 1a t=" << t << " " << possemi::to_string(report.verdict) << '\n';
      }
    } else {
      for (long k : rot_k) {
        const auto report = possemi::run_rotation_example(possemi::RotationScene(k, rot_n));
        emit_figure(dir, suffix_for("figure1b", rot_k.size(), "k" + std::to_string(k)), report,
                    "Rotation example, k = " + std::to_string(k) + " of " + std::to_string(rot_n));
        std::cout << "figure 1b k=" << k << " n=" << rot_n << " " << possemi::to_string(report.verdict) << '\n';
      }
    }
    return possemi::kExitOk;
  } catch (const possemi::HypothesisViolation& e) {
    std::cerr << "possemi: hypothesis violated: " << e.what() << '\n';
    return possemi::kExitHypothesisViolated;
  } catch (const possemi::IllConditionedMidpoint& e) {
    std::cerr << "possemi: " << e.what() << '\n';
    return possemi::kExitHypothesisViolated;
  } catch (const std::exception& e) {
    std::cerr << "possemi: " << e.what() << '\n';
    return possemi::kExitUsage;
  }
}
