// Acceptance gate. Each criterion prints a single PASS/FAIL line; the exit
// status is nonzero when any criterion fails. Seeds and tolerances are
// fixed here so runs are reproducible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "possemi/errors.hpp"
#include "possemi/examples_repro.hpp"
#include "possemi/expconv.hpp"
#include "possemi/jessen.hpp"
#include "possemi/operator_functions.hpp"
#include "possemi/sampling.hpp"
#include "possemi/semigroup.hpp"

using namespace possemi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<OperatorFamily> jessen_families() {
  return {PowerF{-1.0}, PowerF{0.5}, PowerF{2.0}, PowerF{3.0}, NegLog{},
          Entropy{},    ExpH{1.0},   ExpH{-1.0},  HalfSquare{}};
}

Generator two_state() {
  Matrix q(2, 2);
  q << -1, 1, 1, -1;
  return Generator::validate(q, "two_state");
}

Outcome jessen_suite() {
  constexpr int kCases = 1000;
  constexpr double kTimeLimit = 30.0;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  const auto families = jessen_families();
  const double ts[] = {0.1, 1.0, 10.0};
  int ok = 0;
  double worst = 0.0;
  for (int c = 0; c < kCases; ++c) {
    const auto gen = random_generator(rng, dim(rng), 5.0, RowSums::Zero);
    const auto& fam = families[c % families.size()];
    const double t = ts[(c / families.size()) % 3];
    const auto f = random_in_domain(rng, fam, gen.dim());
    const auto r = verify_jessen(gen, fam, f, t);
    const double bound = -1e-9 * (1.0 + lattice_norm(r.residual));
    if (r.min_slack >= bound) ++ok;
    worst = std::min(worst, r.min_slack);
  }
  const double elapsed = seconds_since(start);
  return {ok == kCases && elapsed < kTimeLimit,
          fmt("%d/%d cases within bound, worst min_slack %.3g, %.2fs (limit %.0fs)", ok, kCases, worst, elapsed,
              kTimeLimit)};
}

Outcome negative_control() {
  Rng rng(202);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  const auto families = jessen_families();
  int violations = 0;
  int sampled = 0;
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const auto kind = c % 2 == 0 ? RowSums::Positive : RowSums::NonPositive;
    const auto gen = random_generator(rng, dim(rng), 5.0, kind);
    if (gen.conservative()) continue;
    ++sampled;
    const auto& fam = families[c % families.size()];
    const auto f = random_in_domain(rng, fam, gen.dim());
    try {
      const auto r = verify_jessen(gen, fam, f, 1.0, JessenOptions{{}, false});
      if (r.min_slack < -1e-6) ++violations;
      worst = std::min(worst, r.min_slack);
    } catch (const Error&) {
      // Z(t)f can leave the domain once mass is not conserved
    }
  }
  return {violations >= 1,
          fmt("%d of %d non-conservative generators violate (min_slack < -1e-6), worst %.3g", violations, sampled,
              worst)};
}

Outcome adjoint_suite() {
  constexpr int kTriples = 1000;
  Rng rng(303);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  std::uniform_real_distribution<double> time(0.0, 10.0);
  const auto families = jessen_families();
  double worst_transpose = 0.0;
  double worst_gap = 0.0;
  double worst_consistency = 0.0;
  for (int c = 0; c < kTriples; ++c) {
    const auto gen = random_generator(rng, dim(rng), 5.0, RowSums::Zero);
    const auto& fam = families[c % families.size()];
    const auto f = random_in_domain(rng, fam, gen.dim());
    const auto fstar = random_positive_dual(rng, gen.dim());
    const auto r = verify_adjoint_pairing(gen, fam, fstar, f, time(rng));
    worst_transpose = std::max(worst_transpose, r.transpose_defect);
    worst_gap = std::min(worst_gap, r.pairing_gap);
    worst_consistency = std::max(worst_consistency, std::abs(r.pairing_gap - r.residual_pairing));
  }
  const bool pass = worst_transpose <= 1e-12 && worst_gap >= -1e-9 && worst_consistency <= 1e-10;
  return {pass, fmt("%d triples: transpose defect %.2g (<=1e-12), min gap %.2g (>=-1e-9), "
                    "gap vs <f*,residual> %.2g (<=1e-10)",
                    kTriples, worst_transpose, worst_gap, worst_consistency)};
}

Outcome exponential_convexity() {
  constexpr int kInstances = 500;
  constexpr std::size_t kXi = 1000;
  constexpr double kTol = 1e-8;
  constexpr double kTimeLimit = 60.0;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(404);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  std::uniform_int_distribution<std::size_t> count(1, 6);
  std::uniform_real_distribution<double> pf(1.5, 5.0);
  std::uniform_real_distribution<double> ph(-2.0, 2.0);
  const double ts[] = {0.5, 2.0};

  int ok_f = 0;
  int ok_h = 0;
  double worst_ratio = 0.0;  // min eigenvalue / (1 + max|entry|)
  double worst_form = 0.0;
  for (int c = 0; c < 2 * kInstances; ++c) {
    const bool h_family = c >= kInstances;
    const auto gen = random_generator(rng, dim(rng), 5.0, RowSums::Zero);
    const double t = ts[c % 2];
    ExponentSet pset{{}, h_family ? FamilyKind::H : FamilyKind::F};
    const std::size_t n = count(rng);
    if (h_family) {
      pset.p.push_back(0.0);
      while (pset.p.size() < n + 1) {
        const double p = ph(rng);
        if (p != 0.0) pset.p.push_back(p);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) pset.p.push_back(pf(rng));
    }
    const auto f = h_family ? random_element(rng, gen.dim(), -2.0, 2.0) : random_element(rng, gen.dim(), 0.2, 3.0);
    const auto gram = build_gram(gen, f, t, pset);
    const auto psd = check_order_psd(gram, kXi, 5000 + c, kTol);
    worst_ratio = std::min(worst_ratio, psd.min_eigenvalue / (1.0 + gram.max_abs_entry()));
    worst_form = std::min(worst_form, psd.worst_form);
    if (psd.pass()) ++(h_family ? ok_h : ok_f);
  }
  const double elapsed = seconds_since(start);
  return {ok_f == kInstances && ok_h == kInstances && elapsed < kTimeLimit,
          fmt("F %d/%d, H %d/%d order-PSD (%zu xi each); worst scaled eigenvalue %.2g, worst form %.2g, "
              "%.2fs (limit %.0fs)",
              ok_f, kInstances, ok_h, kInstances, kXi, worst_ratio, worst_form, elapsed, kTimeLimit)};
}

Outcome midpoint_equivalence() {
  constexpr int kInstances = 100;
  Rng rng(505);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  std::uniform_int_distribution<std::size_t> count(1, 5);
  std::uniform_real_distribution<double> px(1.5, 2.5);
  std::uniform_real_distribution<double> pxi(-2.0, 2.0);
  double worst = 0.0;
  for (int c = 0; c < kInstances; ++c) {
    const auto gen = random_generator(rng, dim(rng), 5.0, RowSums::Zero);
    const auto f = random_element(rng, gen.dim(), 0.2, 3.0);
    const auto h = lambda_map(gen, f, FamilyKind::F, 1.0);
    const std::size_t n = count(rng);
    std::vector<double> x(n);
    std::vector<double> xi(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = px(rng);
      xi[i] = pxi(rng);
    }
    const auto rep = midpoint_equivalence_check(h, x, xi);
    worst = std::max({worst, rep.sum_to_midpoint_defect, rep.midpoint_to_sum_defect});
  }

  // n = 1 and n = 2 specializations on the two-state chain
  const auto h = lambda_map(two_state(), {4, 1}, FamilyKind::F, 1.0);
  const std::vector<double> x1{1.75};
  const std::vector<double> xi1{1.0};
  const auto one = exp_convexity_probe(h, x1, xi1, ProbeMode::Sum);
  const double one_defect = lattice_norm(one.form - h(3.5));
  const std::vector<double> x2{2.0, 4.0};
  const std::vector<double> xi2{-1.0, 1.0};
  const auto two = exp_convexity_probe(h, x2, xi2, ProbeMode::Midpoint);
  const double two_defect = lattice_norm(two.form - (h(2.0) + h(4.0) - 2.0 * h(3.0)));
  const bool small_n = one.holds() && two.holds() && one_defect <= 1e-12 && two_defect <= 1e-12;
  return {worst <= 1e-12 && small_n,
          fmt("%d instances, worst substitution defect %.2g (<=1e-12); n=1 %s (%.2g), n=2 %s (%.2g)", kInstances,
              worst, one.holds() ? "holds" : "fails", one_defect, two.holds() ? "holds" : "fails", two_defect)};
}

Outcome log_series_check() {
  constexpr int kSamples = 1000;
  Rng rng(606);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  double worst = 0.0;
  for (int c = 0; c < kSamples; ++c) {
    const auto f = random_element(rng, dim(rng), 0.1, 1.9);  // |e - f| <= 0.9
    const auto l = log_series(f);
    for (std::size_t i = 0; i < f.dim(); ++i) worst = std::max(worst, std::abs(l[i] - std::log(f[i])));
  }
  int raised = 0;
  const std::vector<LatticeElement> outside{{0.1 - 1e-9}, {1.9 + 1e-9, 1.0}, {0.05, 1.0}, {1.95}, {2.5, 0.5}};
  for (const auto& f : outside) {
    try {
      log_series(f);
    } catch (const RadiusViolation&) {
      ++raised;
    }
  }
  const int expected = static_cast<int>(outside.size());
  return {worst <= 1e-10 && raised == expected,
          fmt("%d samples, max |log_series - ln| %.2g (<=1e-10); RadiusViolation %d/%d beyond 0.9", kSamples, worst,
              raised, expected)};
}

Outcome second_derivative() {
  constexpr double kCoarse = 1e-2;
  constexpr double kFine = 5e-3;
  Rng rng(707);
  int ratio_ok = 0;
  int ratio_total = 0;
  int exact_ok = 0;
  int exact_total = 0;
  double lo = INFINITY;
  double hi = 0.0;
  for (const auto& fam : jessen_families()) {
    const auto* pf = std::get_if<PowerF>(&fam.tag());
    // fourth derivative vanishes: the central difference is exact
    const bool exact = std::holds_alternative<HalfSquare>(fam.tag()) || (pf && (pf->t == 2.0 || pf->t == 3.0));
    for (int s = 0; s < 20; ++s) {
      const auto f = random_element(rng, 3, 0.5, 2.0);
      const auto h = random_element(rng, 3, 0.5, 1.0);
      const double coarse = second_derivative_check(fam, f, h, kCoarse);
      const double fine = second_derivative_check(fam, f, h, kFine);
      if (exact) {
        ++exact_total;
        if (coarse <= 1e-9 && fine <= 1e-9) ++exact_ok;
      } else {
        ++ratio_total;
        const double ratio = coarse / fine;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        if (ratio >= 3.0 && ratio <= 5.0) ++ratio_ok;
      }
    }
  }
  return {ratio_ok == ratio_total && exact_ok == exact_total,
          fmt("ratio in [3,5]: %d/%d (observed %.3f..%.3f); FD-exact families (degree <= 3) defect <= 1e-9: %d/%d",
              ratio_ok, ratio_total, lo, hi, exact_ok, exact_total)};
}

Outcome figure_shift() {
  bool pass = true;
  std::string detail;
  for (double t : {0.5, 1.0, 2.0}) {
    const auto r = run_shift_example(ShiftScene(t));
    const bool ok = r.verdict == Ordering::Incomparable && std::abs(r.argmax_lhs - t) <= 1e-9 &&
                    std::abs(r.argmax_rhs + t) <= 1e-9 && std::abs(r.lhs_at_t - 1.0) <= 1e-12 &&
                    std::abs(r.rhs_at_t - std::exp(-4.0 * t * t)) <= 1e-12;
    pass = pass && ok;
    detail += fmt("%st=%g %s argmax %+g/%+g", detail.empty() ? "" : "; ", t, std::string(to_string(r.verdict)).c_str(),
                  r.argmax_lhs, r.argmax_rhs);
  }
  return {pass, detail};
}

Outcome figure_rotation() {
  constexpr std::size_t kPoints = 360;
  std::vector<long> unexpected;
  double worst_defect = 0.0;
  for (long k = 0; k <= static_cast<long>(kPoints); ++k) {
    const auto r = run_rotation_example(RotationScene(k, kPoints));
    worst_defect = std::max(worst_defect, r.formula_defect);
    const bool equal = r.verdict == Ordering::Equal;
    const bool expected = k % static_cast<long>(kPoints) == 0;
    if (equal != expected) unexpected.push_back(k);
  }
  const auto quarter = run_rotation_example(RotationScene(90, kPoints));
  std::string listed;
  for (long k : unexpected) listed += (listed.empty() ? "" : ",") + std::to_string(k);
  return {unexpected.empty() && quarter.verdict == Ordering::Incomparable && worst_defect <= 1e-12,
          fmt("k=90 %s; curve defect %.2g (<=1e-12); EQUAL off multiples of N at k={%s}",
              std::string(to_string(quarter.verdict)).c_str(), worst_defect, listed.empty() ? "none" : listed.c_str())};
}

Outcome semigroup_infrastructure() {
  // oracle: eigenpairs {0: (1,1)}, {-2: (1,-1)} of the two-state generator
  const auto gen = two_state();
  double oracle_defect = 0.0;
  for (double t : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    const Matrix z = evolve(gen, t).matrix;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gen.q());
    const Matrix v = es.eigenvectors();
    const Matrix ref = v * (t * es.eigenvalues()).array().exp().matrix().asDiagonal() * v.transpose();
    oracle_defect = std::max(oracle_defect, (z - ref).cwiseAbs().maxCoeff());
  }

  Rng rng(1010);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  std::uniform_real_distribution<double> time(0.0, 5.0);
  double law_defect = 0.0;
  long negative = 0;
  for (int c = 0; c < 1000; ++c) {
    const auto g = random_generator(rng, dim(rng), 5.0, c % 2 == 0 ? RowSums::Zero : RowSums::NonPositive);
    const double s = time(rng);
    const double t = time(rng);
    const Matrix zs = evolve(g, s).matrix;
    const Matrix zt = evolve(g, t).matrix;
    const Matrix zst = evolve(g, s + t).matrix;
    law_defect = std::max(law_defect, (zs * zt - zst).cwiseAbs().maxCoeff());
    negative += (zs.array() < 0.0).count() + (zt.array() < 0.0).count() + (zst.array() < 0.0).count();
  }
  return {oracle_defect <= 1e-12 && law_defect <= 1e-10 && negative == 0,
          fmt("2-state vs eigendecomposition %.2g (<=1e-12); semigroup law over 1000 draws %.2g (<=1e-10); "
              "negative entries %ld",
              oracle_defect, law_defect, negative)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"Jessen suite", jessen_suite},
      {"negative control", negative_control},
      {"adjoint pairing", adjoint_suite},
      {"exponential convexity", exponential_convexity},
      {"sum/midpoint equivalence", midpoint_equivalence},
      {"log series", log_series_check},
      {"second-derivative certification", second_derivative},
      {"shift example", figure_shift},
      {"rotation example", figure_rotation},
      {"semigroup infrastructure", semigroup_infrastructure},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
