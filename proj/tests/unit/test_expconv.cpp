#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "possemi/errors.hpp"
#include "possemi/expconv.hpp"
#include "possemi/sampling.hpp"

using namespace possemi;

namespace {

Generator two_state() {
  Matrix q(2, 2);
  q << -1, 1, 1, -1;
  return Generator::validate(q, "two_state");
}

// Lambda_p for the two-state chain at t, f = (4, 1), from the closed-form
// transition matrix and scalar powers.
std::vector<double> two_state_lambda(double p, double t) {
  const double d = std::exp(-2.0 * t);
  const double a = (1 + d) / 2;
  const double b = (1 - d) / 2;
  auto F = [p](double x) { return std::pow(x, p) / (p * (p - 1)); };
  const double zf0 = 4 * a + 1 * b;
  const double zf1 = 4 * b + 1 * a;
  return {a * F(4) + b * F(1) - F(zf0), b * F(4) + a * F(1) - F(zf1)};
}

double min_eig_2x2(double a, double b, double c) {
  return 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

double max_abs_diff(const LatticeElement& x, const LatticeElement& y) { return lattice_norm(x - y); }

}  // namespace

TEST_CASE("lambda residual examples") {
  const auto zero = Generator::validate(Matrix::Zero(3, 3));
  for (double p : {-1.0, 0.0, 0.5, 1.0, 2.0, 3.5})
    for (double t : {0.0, 1.0, 10.0})
      CHECK(lambda_residual(zero, {1, 2, 3}, FamilyKind::F, p, t) == LatticeElement::zero(3));

  const auto lam = lambda_residual(two_state(), {4, 1}, FamilyKind::F, 2.0, 40.0);
  CHECK(std::abs(lam[0] - 1.125) <= 1e-12);
  CHECK(std::abs(lam[1] - 1.125) <= 1e-12);

  for (double p : {-2.0, 0.0, 1.0, 2.5}) {
    const auto c = lambda_residual(two_state(), 3.0 * LatticeElement::unit(2), FamilyKind::F, p, 1.0);
    CHECK(lattice_norm(c) <= 1e-13);
  }

  Matrix q(2, 2);
  q << -2, 1, 1, -1;
  CHECK_THROWS_AS(lambda_residual(Generator::validate(q), {1, 1}, FamilyKind::F, 2.0, 1.0), NotNormalized);
}

TEST_CASE("family members and the singularity guard") {
  CHECK(std::holds_alternative<NegLog>(family_member(FamilyKind::F, 0.0).tag()));
  CHECK(std::holds_alternative<Entropy>(family_member(FamilyKind::F, 1.0).tag()));
  CHECK(std::holds_alternative<HalfSquare>(family_member(FamilyKind::H, 0.0).tag()));
  CHECK(std::holds_alternative<ExpH>(family_member(FamilyKind::H, 1e-12).tag()));
  CHECK_THROWS_AS(family_member(FamilyKind::F, 0.9999999), IllConditionedMidpoint);
  CHECK_THROWS_AS(family_member(FamilyKind::F, 5e-7), IllConditionedMidpoint);
  CHECK_NOTHROW(family_member(FamilyKind::F, 1.0 + 2e-6));

  CHECK_THROWS_AS(ExponentSet{{0.9999999}}.validate(), IllConditionedMidpoint);
  // the individual points are fine but their midpoint sits next to 1
  CHECK_THROWS_AS((ExponentSet{{0.5, 1.5 - 1e-7}}.validate()), IllConditionedMidpoint);
  CHECK_NOTHROW((ExponentSet{{0.5, 1.5}}.validate()));
  CHECK_NOTHROW((ExponentSet{{0.9999999}, FamilyKind::H}.validate()));
  CHECK_THROWS_AS(ExponentSet{}.validate(), InvalidArgument);
  CHECK_THROWS_AS(ExponentSet{{NAN}}.validate(), InvalidArgument);

  try {
    ExponentSet{{0.9999999}}.validate();
  } catch (const IllConditionedMidpoint& e) {
    CHECK(std::string(e.what()).find("0.9999999") != std::string::npos);
  }
}

TEST_CASE("Gram matrix against the closed-form oracle") {
  const ExponentSet pset{{2.0, 4.0}};
  const auto gram = build_gram(two_state(), {4, 1}, 1.0, pset);
  REQUIRE(gram.size() == 2);
  REQUIRE(gram.dim() == 2);

  const auto l2 = two_state_lambda(2.0, 1.0);
  const auto l3 = two_state_lambda(3.0, 1.0);
  const auto l4 = two_state_lambda(4.0, 1.0);
  for (std::size_t c = 0; c < 2; ++c) {
    const Matrix& m = gram.coordinate_matrices[c];
    CHECK(std::abs(m(0, 0) - l2[c]) <= 1e-12);
    CHECK(std::abs(m(0, 1) - l3[c]) <= 1e-12);
    CHECK(std::abs(m(1, 1) - l4[c]) <= 1e-11);
    CHECK(m(0, 1) == m(1, 0));
    const double oracle = min_eig_2x2(l2[c], l3[c], l4[c]);
    CHECK(std::abs(gram.min_eigenvalues[c] - oracle) <= 1e-10);
    CHECK(gram.min_eigenvalues[c] >= -1e-10);
  }

  const auto psd = check_order_psd(gram, 1000, 17);
  CHECK(psd.pass());
  CHECK(psd.samples == 1000);
  CHECK(psd.min_eigenvalue == doctest::Approx(gram.min_eigenvalue()));
}

TEST_CASE("degenerate Grams") {
  const auto zero = Generator::validate(Matrix::Zero(2, 2));
  const auto gram = build_gram(zero, {2, 3}, 1.0, ExponentSet{{1.5, 2.5, 3.5}});
  CHECK(gram.max_abs_entry() == 0.0);
  CHECK(gram.min_eigenvalue() == 0.0);
  const auto psd = check_order_psd(gram, 100, 1);
  CHECK(psd.pass());
  CHECK(psd.min_eigenvalue == 0.0);

  const auto g = build_gram(two_state(), {4, 1}, 1.0, ExponentSet{{2, 3, 4}});
  const std::vector<double> xi(3, 0.0);
  CHECK(quadratic_form(g.entries, xi) == LatticeElement::zero(2));

  const auto single = build_gram(two_state(), {4, 1}, 0.7, ExponentSet{{3.0}});
  const auto lam = lambda_residual(two_state(), {4, 1}, FamilyKind::F, 3.0, 0.7);
  CHECK(single.entries[0][0] == lam);
  CHECK(single.coordinate_matrices[0](0, 0) == lam[0]);
}

TEST_CASE("Gram errors name the midpoint") {
  try {
    build_gram(two_state(), {1, 2}, 1.0, ExponentSet{{2.0, 4.0}}, GramOptions{true, false});
  } catch (...) {
    FAIL("valid gram threw");
  }
  CHECK_THROWS_AS(build_gram(two_state(), {1, -1}, 1.0, ExponentSet{{2.0, 4.0}}), DomainViolation);
  try {
    build_gram(two_state(), {1, -1}, 1.0, ExponentSet{{2.0, 4.0}});
  } catch (const DomainViolation& e) {
    CHECK(std::string(e.what()).find("midpoint p = 2") != std::string::npos);
  }
  CHECK_THROWS_AS(build_gram(two_state(), {1, 2}, 1.0, ExponentSet{{0.9999999}}), IllConditionedMidpoint);
}

TEST_CASE("a non-PSD matrix is caught") {
  LambdaGram g;
  g.p = {0, 1};
  g.entries = {{LatticeElement{1.0}, LatticeElement{2.0}}, {LatticeElement{2.0}, LatticeElement{1.0}}};
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  g.coordinate_matrices = {m};
  g.min_eigenvalues = {-1.0};
  const auto psd = check_order_psd(g, 200, 4);
  CHECK_FALSE(psd.spectral_pass);
  CHECK_FALSE(psd.sampled_pass);
  CHECK(psd.worst_form < 0.0);
}

TEST_CASE("exponential convexity on random instances") {
  Rng rng(404);
  std::uniform_int_distribution<std::size_t> dim(1, 6);
  std::uniform_int_distribution<std::size_t> count(1, 6);
  std::uniform_real_distribution<double> pf(1.5, 5.0);
  std::uniform_real_distribution<double> ph(-2.0, 2.0);
  for (int s = 0; s < 100; ++s) {
    const auto gen = random_generator(rng, dim(rng), 5.0, RowSums::Zero);
    const double t = s % 2 == 0 ? 0.5 : 2.0;
    ExponentSet fset{{}, FamilyKind::F};
    ExponentSet hset{{0.0}, FamilyKind::H};
    const std::size_t n = count(rng);
    for (std::size_t i = 0; i < n; ++i) {
      fset.p.push_back(pf(rng));
      hset.p.push_back(ph(rng));
    }
    const auto f_pos = random_element(rng, gen.dim(), 0.2, 3.0);
    const auto f_any = random_element(rng, gen.dim(), -2.0, 2.0);
    for (const auto& [set, f] : {std::pair{fset, f_pos}, std::pair{hset, f_any}}) {
      const auto gram = build_gram(gen, f, t, set);
      const auto psd = check_order_psd(gram, 50, s);
      REQUIRE(psd.spectral_pass);
      REQUIRE(psd.sampled_pass);
      REQUIRE(psd.min_eigenvalue >= -1e-8 * (1 + gram.max_abs_entry()));
    }
  }
}

TEST_CASE("probe specializations") {
  const auto h = lambda_map(two_state(), {4, 1}, FamilyKind::F, 1.0);
  const std::vector<double> x1{1.25};
  const std::vector<double> xi1{3.0};
  const auto one = exp_convexity_probe(h, x1, xi1, ProbeMode::Sum);
  CHECK(one.holds());
  CHECK(max_abs_diff(one.form, 9.0 * h(2.5)) <= 1e-14 * (1 + lattice_norm(one.form)));

  const std::vector<double> x2{2.0, 4.0};
  const std::vector<double> xi2{-1.0, 1.0};
  const auto two = exp_convexity_probe(h, x2, xi2, ProbeMode::Midpoint);
  CHECK(two.holds());
  const auto rearranged = h(2.0) + h(4.0) - 2.0 * h(3.0);
  CHECK(max_abs_diff(two.form, rearranged) <= 1e-14 * (1 + lattice_norm(rearranged)));

  // brute-force double sum on p = {2, 3, 4}
  const std::vector<double> x3{2.0, 3.0, 4.0};
  const std::vector<double> xi3{0.7, -1.3, 0.4};
  for (auto mode : {ProbeMode::Sum, ProbeMode::Midpoint}) {
    const auto r = exp_convexity_probe(h, x3, xi3, mode);
    CHECK(r.holds());
    LatticeElement brute = LatticeElement::zero(2);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const double arg = mode == ProbeMode::Sum ? x3[i] + x3[j] : 0.5 * (x3[i] + x3[j]);
        brute += xi3[i] * xi3[j] * h(arg);
      }
    CHECK(max_abs_diff(r.form, brute) <= 1e-12 * (1 + lattice_norm(brute)));
  }

  const Interval domain{1.5, 5.0};
  CHECK_THROWS_AS(exp_convexity_probe(h, x3, xi3, ProbeMode::Sum, domain), DomainViolation);
  CHECK_NOTHROW(exp_convexity_probe(h, x3, xi3, ProbeMode::Midpoint, domain));
  CHECK_THROWS_AS(exp_convexity_probe(h, x3, xi2, ProbeMode::Sum), DimensionMismatch);
}

TEST_CASE("sum and midpoint forms are the same substitution") {
  const auto h = lambda_map(two_state(), {4, 1}, FamilyKind::F, 1.0);
  const std::vector<double> x{1.6, 2.2, 2.9};
  const std::vector<double> xi{1.0, -0.5, 2.0};
  const auto rep = midpoint_equivalence_check(h, x, xi);
  CHECK(rep.pass);
  CHECK(rep.sum_to_midpoint_defect <= 1e-12);
  CHECK(rep.midpoint_to_sum_defect <= 1e-12);

  Rng rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int s = 0; s < 50; ++s) {
    const double a = u(rng);
    const double b = u(rng);
    const ParametricMap quad = [a, b](double p) { return LatticeElement{a * p * p + b, std::cosh(p)}; };
    std::vector<double> xs(4);
    std::vector<double> xis(4);
    for (std::size_t i = 0; i < 4; ++i) {
      xs[i] = u(rng);
      xis[i] = u(rng);
    }
    REQUIRE(midpoint_equivalence_check(quad, xs, xis).pass);
  }
}

TEST_CASE("coupled reading and H family") {
  const ExponentSet pset{{0.5, 1.5, 2.5}};
  const auto coupled = build_gram(two_state(), {4, 1}, 1.0, pset, GramOptions{true, true});
  CHECK(coupled.coupled);
  CHECK(coupled.dim() == 2);
  CHECK_THROWS_AS(build_gram(two_state(), {4, 1}, 1.0, ExponentSet{{-2.0, -1.0}}, GramOptions{true, true}),
                  DomainViolation);

  const ExponentSet hset{{-1.0, 0.0, 1.0}, FamilyKind::H};
  const auto hg = build_gram(two_state(), {-1, 2}, 1.0, hset);
  CHECK(check_order_psd(hg, 200, 8).pass());
  // the p = 0 diagonal entry is the residual of x^2 / 2
  const auto half = verify_jessen(two_state(), HalfSquare{}, {-1, 2}, 1.0).residual;
  CHECK(max_abs_diff(hg.entries[1][1], half) <= 1e-14);
}

TEST_CASE("H residual is stable through p = 0") {
  Rng rng(12);
  const auto gen = random_generator(rng, 4, 5.0, RowSums::Zero);
  const auto f = random_element(rng, 4, -2.0, 2.0);
  const auto z = evolve(gen, 1.0);
  for (double p : {-2.0, -0.7, 0.5, 1.0, 2.0}) {
    const auto direct = verify_jessen(gen, z, ExpH{p}, f).residual;
    const auto lam = lambda_residual(gen, z, f, FamilyKind::H, p);
    CHECK(lattice_norm(lam - direct) <= 1e-12 * (1 + lattice_norm(direct)));
  }
  const auto at_zero = lambda_residual(gen, z, f, FamilyKind::H, 0.0);
  CHECK(lattice_norm(at_zero - verify_jessen(gen, z, HalfSquare{}, f).residual) <= 1e-14);
  // first-order in p near zero, no 1/p^2 blowup
  for (double p : {1e-4, 1e-6, 3.5e-6, -1e-8, 1e-12}) {
    const auto lam = lambda_residual(gen, z, f, FamilyKind::H, p);
    CHECK(lattice_norm(lam - at_zero) <= 10 * std::abs(p) * (1 + lattice_norm(at_zero)));
  }
}

TEST_CASE("continuity sweep shrinks with the step") {
  const auto h = lambda_map(two_state(), {4, 1}, FamilyKind::F, 1.0);
  const std::vector<double> grid{2.0, 2.5, 3.0};
  const std::vector<double> steps{1e-1, 1e-2, 1e-3};
  const auto sweep = continuity_sweep(h, grid, steps);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[1] < sweep[0]);
  CHECK(sweep[2] < sweep[1]);
}

TEST_CASE("Gram export") {
  const auto gram = build_gram(two_state(), {4, 1}, 1.0, ExponentSet{{2.0, 4.0}});
  const nlohmann::json j = gram;
  CHECK(j["family_kind"] == "F");
  CHECK(j["coordinates"].size() == 2);
  CHECK(j["coordinates"][0]["matrix"].size() == 2);

  std::ostringstream csv;
  write_gram_csv(csv, gram);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "p_i,p_j,coordinate,value");
  std::size_t rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 2 * 2 * 2);

  const nlohmann::json jp = check_order_psd(gram, 10, 1);
  CHECK(jp.contains("spectral_pass"));
}
