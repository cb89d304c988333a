#include "possemi/suite.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>

#include "possemi/errors.hpp"
#include "possemi/jessen.hpp"
#include "possemi/sampling.hpp"

namespace possemi {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> number_list(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw InvalidArgument(std::string(what) + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Generator load_generator(const json& item, const fs::path& base_dir) {
  if (item.is_string() || (item.is_object() && item.contains("file"))) {
    const fs::path ref = item.is_string() ? item.get<std::string>() : item["file"].get<std::string>();
    const fs::path path = ref.is_absolute() ? ref : base_dir / ref;
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open generator file " + path.string());
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InvalidArgument("generator file " + path.string() + ": " + e.what());
    }
    if (!j.contains("name")) j["name"] = path.stem().string();
    return generator_from_json(j);
  }
  return generator_from_json(item);
}

/// Running pass/fail tally of one asserted suite.
struct Tally {
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst = 0.0;
  std::string first_failure;

  void record(bool pass, double defect, const std::string& what) {
    ++cases;
    worst = std::max(worst, defect);
    if (!pass) {
      if (failures == 0) first_failure = what;
      ++failures;
    }
  }
  json to_json() const {
    json j{{"cases", cases}, {"failures", failures}, {"worst_defect", worst}, {"pass", failures == 0}};
    if (failures > 0) j["first_failure"] = first_failure;
    return j;
  }
};

std::string case_label(const Generator& g, const std::string& what, double t) {
  return g.name() + " / " + what + " / t=" + detail::num(t);
}

void run_lattice_suite(const SuiteConfig& cfg, Rng& rng, Tally& tally) {
  std::set<std::size_t> dims;
  for (const auto& g : cfg.generators) dims.insert(g.dim());
  for (std::size_t n : dims) {
    for (std::size_t s = 0; s < cfg.samples; ++s) {
      const auto f = random_element(rng, n, -3.0, 3.0);
      const auto g = random_element(rng, n, -3.0, 3.0);
      const auto h = random_element(rng, n, -3.0, 3.0);
      const auto lo = meet(f, g);
      const auto hi = join(f, g);
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i) ok = ok && lo[i] <= f[i] && f[i] <= hi[i];
      ok = ok && pos_part(f) - neg_part(f) == f && pos_part(f) + neg_part(f) == abs_val(f);
      const auto abs_f = abs_val(f);
      const auto abs_g = abs_val(g);
      bool dominated = true;
      for (std::size_t i = 0; i < n; ++i) dominated = dominated && abs_f[i] <= abs_g[i];
      if (dominated) ok = ok && lattice_norm(f) <= lattice_norm(g);
      ok = ok && is_positive(multiply(abs_val(f), abs_val(g)));
      ok = ok && partial_leq(f, g, cfg.order_tol) == partial_leq(f + h, g + h, cfg.order_tol);
      tally.record(ok, 0.0, "lattice axioms, dim " + std::to_string(n));
    }
  }
}

void run_semigroup_suite(const SuiteConfig& cfg, Rng& rng, Tally& axioms, Tally& positivity, json& observed) {
  for (const auto& gen : cfg.generators) {
    for (double t : cfg.t_grid) {
      const auto f = random_element(rng, gen.dim(), -1.0, 1.0);
      const double scale =
          std::max(1.0, evolve(gen, 1.5 * t).matrix.cwiseAbs().rowwise().sum().maxCoeff());
      const CheckReport ax = check_semigroup_axioms(gen, 0.5 * t, t, f, 1e-10 * scale);
      for (const auto& c : ax.checks)
        axioms.record(c.pass, c.name == "strong_continuity" ? 0.0 : c.defect, case_label(gen, c.name, t));

      const CheckReport pos = check_positivity_and_normalization(gen, t, f);
      for (const auto& c : pos.checks) {
        const bool asserted = c.name == "positivity" || (c.name == "normalization" && gen.conservative()) ||
                              (c.name == "contraction" && gen.subconservative());
        if (asserted) {
          positivity.record(c.pass, c.defect, case_label(gen, c.name, t));
        } else {
          json entry = c;
          entry["generator"] = gen.name();
          entry["t"] = t;
          observed["semigroup_unasserted"].push_back(entry);
        }
      }
    }
  }
}

}  // namespace

SuiteConfig parse_config(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  SuiteConfig cfg;
  cfg.source = j;

  if (!j.contains("generators") || !j["generators"].is_array() || j["generators"].empty())
    throw InvalidArgument("config needs a non-empty 'generators' list");
  for (const auto& item : j["generators"]) cfg.generators.push_back(load_generator(item, base_dir));

  if (j.contains("families")) {
    if (!j["families"].is_array()) throw InvalidArgument("'families' must be an array");
    for (const auto& item : j["families"]) cfg.families.push_back(family_from_json(item));
  }
  if (j.contains("t_grid")) cfg.t_grid = number_list(j["t_grid"], "t_grid");
  for (double t : cfg.t_grid)
    if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("t_grid entries must be finite and >= 0");

  if (j.contains("p_sets")) {
    if (!j["p_sets"].is_array()) throw InvalidArgument("'p_sets' must be an array");
    for (const auto& item : j["p_sets"]) {
      PSet ps;
      if (item.is_object()) {
        ps.p = number_list(item.at("p"), "p_sets[].p");
        const auto kind = item.value("kind", std::string("F"));
        if (kind != "F" && kind != "H") throw InvalidArgument("p_sets[].kind must be F or H");
        ps.kind = kind == "H" ? FamilyKind::H : FamilyKind::F;
      } else {
        ps.p = number_list(item, "p_sets[]");
      }
      if (ps.p.empty()) throw InvalidArgument("p_sets entries must be non-empty");
      cfg.p_sets.push_back(std::move(ps));
    }
  }

  if (j.contains("samples")) {
    if (!j["samples"].is_number_integer() || j["samples"].get<long long>() < 1)
      throw InvalidArgument("'samples' must be an integer >= 1");
    cfg.samples = j["samples"].get<std::size_t>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer()) throw InvalidArgument("'seed' must be an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tolerances")) {
    const auto& tj = j["tolerances"];
    cfg.order_tol.atol = tj.value("atol", cfg.order_tol.atol);
    cfg.order_tol.rtol = tj.value("rtol", cfg.order_tol.rtol);
    cfg.psd_tol = tj.value("psd", cfg.psd_tol);
    if (cfg.order_tol.atol < 0 || cfg.order_tol.rtol < 0 || cfg.psd_tol < 0)
      throw InvalidArgument("tolerances must be nonnegative");
  }
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  cfg.allow_nonconservative = j.value("allow_nonconservative", false);
  cfg.coupled_lambda = j.value("coupled_lambda", false);
  if (j.contains("f")) cfg.f = number_list(j["f"], "f");
  return cfg;
}

SuiteConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

namespace {

SuiteOutcome hypothesis_failure(const std::string& message) {
  SuiteOutcome out;
  out.exit_code = kExitHypothesisViolated;
  out.message = message;
  out.report = json{{"error", message}};
  return out;
}

const Generator* first_nonconservative(const SuiteConfig& cfg) {
  for (const auto& g : cfg.generators)
    if (!g.conservative()) return &g;
  return nullptr;
}

LatticeElement gram_test_vector(const SuiteConfig& cfg, Rng& rng, std::size_t n, FamilyKind kind) {
  if (!cfg.f.empty()) {
    if (cfg.f.size() != n) throw DimensionMismatch(cfg.f.size(), n);
    return LatticeElement(cfg.f);
  }
  return kind == FamilyKind::F ? random_element(rng, n, 0.5, 2.0) : random_element(rng, n, -1.0, 1.0);
}

}  // namespace

SuiteOutcome run_verify(const SuiteConfig& cfg) {
  if (!cfg.allow_nonconservative) {
    if (const Generator* g = first_nonconservative(cfg); g != nullptr)
      return hypothesis_failure(NotNormalized(g->name()).what());
  }
  try {
    Rng rng(cfg.seed);
    Tally lattice, axioms, positivity, jessen, support, adjoint, gram_tally;
    json observed = json::object();
    json jessen_cases = json::array();

    run_lattice_suite(cfg, rng, lattice);
    run_semigroup_suite(cfg, rng, axioms, positivity, observed);

    for (const auto& gen : cfg.generators) {
      for (double t : cfg.t_grid) {
        const SemigroupOperator z = evolve(gen, t);
        for (const auto& fam : cfg.families) {
          for (std::size_t s = 0; s < cfg.samples; ++s) {
            const auto f = random_in_domain(rng, fam, gen.dim());
            const std::string label = case_label(gen, fam.name(), t);
            if (!gen.conservative()) {
              const auto r = verify_jessen(gen, z, fam, f, JessenOptions{cfg.order_tol, false});
              observed["negative_control"].push_back(
                  {{"generator", gen.name()}, {"family", r.family}, {"t", t}, {"min_slack", r.min_slack},
                   {"verdict", to_string(r.verdict)}});
              continue;
            }
            try {
              const auto r = verify_jessen(gen, z, fam, f, JessenOptions{cfg.order_tol, true});
              const double bound = -1e-9 * (1.0 + lattice_norm(r.residual));
              jessen.record(r.min_slack >= bound, std::max(0.0, -r.min_slack), label);
              jessen_cases.push_back({{"generator", gen.name()}, {"family", r.family}, {"t", t},
                                      {"verdict", to_string(r.verdict)}, {"min_slack", r.min_slack}});

              if (fam.has_first()) {
                const auto f0 = z.apply(f);
                support.record(is_leq(support_line_check(fam, f, f0, cfg.order_tol)), 0.0, label);
              }

              const DualVector fstar = random_positive_dual(rng, gen.dim());
              const auto a = verify_adjoint_pairing(gen, z, fam, fstar, f);
              const double consistency = std::abs(a.pairing_gap - a.residual_pairing);
              const bool ok = a.checks.all_pass() && consistency <= 1e-10 * (1.0 + std::abs(a.pairing_gap));
              adjoint.record(ok, std::max(a.transpose_defect, consistency), label);
            } catch (const HypothesisViolation&) {
              throw;
            } catch (const Error& e) {
              jessen.record(false, 0.0, label + ": " + e.what());
            }
          }
        }
      }
    }

    json grams = json::array();
    for (const auto& gen : cfg.generators) {
      if (!gen.conservative()) continue;
      for (double t : cfg.t_grid) {
        for (const auto& ps : cfg.p_sets) {
          const ExponentSet pset{ps.p, ps.kind};
          const auto f = gram_test_vector(cfg, rng, gen.dim(), ps.kind);
          const std::string label = case_label(gen, "gram", t);
          try {
            const auto gram = build_gram(gen, f, t, pset);
            const auto psd = check_order_psd(gram, 100, cfg.seed, cfg.psd_tol);
            gram_tally.record(psd.pass(), std::max(0.0, -psd.min_eigenvalue), label);
            json entry = psd;
            entry["generator"] = gen.name();
            entry["t"] = t;
            entry["p"] = ps.p;
            grams.push_back(entry);
            if (cfg.coupled_lambda) {
              const auto coupled = build_gram(gen, f, t, pset, GramOptions{true, true});
              json c = check_order_psd(coupled, 100, cfg.seed, cfg.psd_tol);
              c["generator"] = gen.name();
              c["p"] = ps.p;
              observed["coupled_lambda"].push_back(c);
            }
          } catch (const IllConditionedMidpoint&) {
            throw;
          } catch (const HypothesisViolation&) {
            throw;
          } catch (const Error& e) {
            gram_tally.record(false, 0.0, label + ": " + e.what());
          }
        }
      }
    }

    json asserted{{"lattice", lattice.to_json()},       {"semigroup_axioms", axioms.to_json()},
                  {"positivity", positivity.to_json()}, {"jessen", jessen.to_json()},
                  {"support_line", support.to_json()},  {"adjoint_pairing", adjoint.to_json()},
                  {"gram_psd", gram_tally.to_json()}};
    bool all = true;
    for (const auto& [name, entry] : asserted.items()) all = all && entry["pass"].get<bool>();

    SuiteOutcome out;
    out.exit_code = all ? kExitOk : kExitAssertionFailed;
    out.report = json{{"command", "verify"}, {"seed", cfg.seed},        {"config", cfg.source},
                      {"asserted", asserted}, {"observed", observed},   {"jessen_cases", jessen_cases},
                      {"grams", grams},       {"pass", all}};
    out.message = all ? "all asserted invariants hold" : "asserted invariant failures, see report";
    return out;
  } catch (const IllConditionedMidpoint& e) {
    return hypothesis_failure(e.what());
  } catch (const HypothesisViolation& e) {
    return hypothesis_failure(e.what());
  }
}

SuiteOutcome run_expconv(const SuiteConfig& cfg) {
  if (cfg.p_sets.empty()) throw InvalidArgument("expconv needs at least one entry in 'p_sets'");
  if (!cfg.allow_nonconservative) {
    if (const Generator* g = first_nonconservative(cfg); g != nullptr)
      return hypothesis_failure(NotNormalized(g->name()).what());
  }
  try {
    for (const auto& ps : cfg.p_sets) ExponentSet{ps.p, ps.kind}.validate();
  } catch (const IllConditionedMidpoint& e) {
    return hypothesis_failure(e.what());
  }

  Rng rng(cfg.seed);
  json grams = json::array();
  json table = json::array();
  std::vector<LambdaGram> gram_objects;
  bool all = true;
  for (const auto& gen : cfg.generators) {
    for (double t : cfg.t_grid) {
      const SemigroupOperator z = evolve(gen, t);
      for (const auto& ps : cfg.p_sets) {
        const ExponentSet pset{ps.p, ps.kind};
        const auto f = gram_test_vector(cfg, rng, gen.dim(), ps.kind);
        const GramOptions gopts{!cfg.allow_nonconservative, cfg.coupled_lambda};
        const auto gram = build_gram(gen, f, t, pset, gopts);
        const auto psd = check_order_psd(gram, 1000, cfg.seed, cfg.psd_tol);
        all = all && psd.pass();

        json g = gram;
        g["generator"] = gen.name();
        g["f"] = f;
        g["psd"] = psd;
        json diagonal = json::array();
        for (std::size_t i = 0; i < pset.size(); ++i) {
          const auto jr = verify_jessen(gen, z, family_member(ps.kind, ps.p[i]), f,
                                        JessenOptions{cfg.order_tol, !cfg.allow_nonconservative});
          diagonal.push_back({{"p", ps.p[i]}, {"gram_diagonal", gram.entries[i][i]}, {"jessen_residual", jr.residual}});
        }
        g["diagonal"] = diagonal;
        grams.push_back(g);
        gram_objects.push_back(gram);
        for (std::size_t k = 0; k < gram.dim(); ++k)
          table.push_back({{"generator", gen.name()}, {"t", t}, {"p", ps.p}, {"coordinate", k},
                           {"min_eig", gram.min_eigenvalues[k]}});
      }
    }
  }
  SuiteOutcome out;
  out.exit_code = all ? kExitOk : kExitAssertionFailed;
  out.report = json{{"command", "expconv"}, {"seed", cfg.seed}, {"config", cfg.source},
                    {"grams", grams},       {"min_eigenvalues", table}, {"pass", all}};
  out.message = all ? "all Gram matrices are order-PSD" : "Gram PSD failure, see report";
  out.grams = std::move(gram_objects);
  return out;
}

void write_report(const fs::path& dir, const std::string& name, const json& report) {
  fs::create_directories(dir);
  std::ofstream(dir / name) << report.dump(2) << '\n';
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  const json meta{{"report", name},
                  {"unix_time", std::chrono::duration_cast<std::chrono::seconds>(now).count()}};
  std::ofstream(dir / "metadata.json") << meta.dump(2) << '\n';
}

}  // namespace possemi
