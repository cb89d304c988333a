#include "possemi/expconv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "possemi/errors.hpp"

namespace possemi {

namespace {

// (e^y - 1 - y) / y^2, accurate through y = 0 where it equals 1/2.
double exp_remainder(double y) {
  if (std::abs(y) >= 0.5) return (std::expm1(y) - y) / (y * y);
  double term = 0.5;
  double sum = 0.5;
  for (int k = 3; std::abs(term) > 1e-17 * std::abs(sum); ++k) {
    term *= y / k;
    sum += term;
  }
  return sum;
}

// e^(px)/p^2 minus its affine part 1/p^2 + x/p. A normalized positive Z
// maps affine functions to themselves, so the residual is unchanged, but
// the 1/p^2 constant no longer cancels in floating point near p = 0.
LatticeElement exp_kernel(const LatticeElement& f, double p) {
  std::vector<double> out(f.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] * f[i] * exp_remainder(p * f[i]);
  return LatticeElement(std::move(out));
}

}  // namespace

OperatorFamily family_member(FamilyKind kind, double p) {
  if (!std::isfinite(p)) throw InvalidArgument("family exponent must be finite");
  if (kind == FamilyKind::H) return OperatorFamily::h_family(p);
  const bool near_zero = p != 0.0 && std::abs(p) < kSingularityGuard;
  const bool near_one = p != 1.0 && std::abs(p - 1.0) < kSingularityGuard;
  if (near_zero || near_one) throw IllConditionedMidpoint(p);
  return OperatorFamily::f_family(p);
}

void ExponentSet::validate() const {
  if (p.empty()) throw InvalidArgument("exponent set is empty");
  for (double v : p)
    if (!std::isfinite(v)) throw InvalidArgument("exponent set contains a non-finite value");
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i; j < p.size(); ++j) family_member(kind, midpoint(i, j));
}

LatticeElement lambda_residual(const Generator& gen, const LatticeElement& f, FamilyKind kind, double p,
                               double t, const LambdaOptions& opts) {
  if (opts.require_normalized && !gen.conservative()) throw NotNormalized(gen.name());
  return lambda_residual(gen, evolve(gen, t), f, kind, p, opts);
}

LatticeElement lambda_residual(const Generator& gen, const SemigroupOperator& z, const LatticeElement& f,
                               FamilyKind kind, double p, const LambdaOptions& opts) {
  if (kind == FamilyKind::H && gen.conservative()) {
    const OperatorFamily member = family_member(kind, p);
    const LatticeElement zf = z.apply(f);
    member.check_domain(f);
    member.check_domain(zf);
    return z.apply(exp_kernel(f, p)) - exp_kernel(zf, p);
  }
  const auto report = verify_jessen(gen, z, family_member(kind, p), f,
                                    JessenOptions{OrderTolerance{}, opts.require_normalized});
  return report.residual;
}

double LambdaGram::max_abs_entry() const {
  double m = 0.0;
  for (const auto& row : entries)
    for (const auto& e : row) m = std::max(m, lattice_norm(e));
  return m;
}

double LambdaGram::min_eigenvalue() const {
  return min_eigenvalues.empty() ? 0.0 : *std::min_element(min_eigenvalues.begin(), min_eigenvalues.end());
}

LambdaGram build_gram(const Generator& gen, const LatticeElement& f, double t, const ExponentSet& pset,
                      const GramOptions& opts) {
  if (opts.require_normalized && !gen.conservative()) throw NotNormalized(gen.name());
  pset.validate();
  const std::size_t n = pset.size();
  LambdaGram gram;
  gram.p = pset.p;
  gram.t = t;
  gram.kind = pset.kind;
  gram.coupled = opts.coupled;
  gram.entries.assign(n, std::vector<LatticeElement>(n));

  const SemigroupOperator z = evolve(gen, t);
  const LambdaOptions lopts{opts.require_normalized};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double mid = pset.midpoint(i, j);
      try {
        if (opts.coupled) {
          if (mid < 0.0) throw DomainViolation("coupled reading needs nonnegative midpoints");
          gram.entries[i][j] = lambda_residual(gen, evolve(gen, mid), f, pset.kind, mid, lopts);
        } else {
          gram.entries[i][j] = lambda_residual(gen, z, f, pset.kind, mid, lopts);
        }
      } catch (const HypothesisViolation&) {
        throw;
      } catch (const Error& err) {
        throw DomainViolation("midpoint p = " + detail::num(mid) + ": " + err.what());
      }
      gram.entries[j][i] = gram.entries[i][j];
    }
  }

  const std::size_t dim = f.dim();
  gram.coordinate_matrices.assign(dim, Matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  gram.min_eigenvalues.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    Matrix& m = gram.coordinate_matrices[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gram.entries[i][j][k];
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    gram.min_eigenvalues[k] = solver.eigenvalues().minCoeff();
  }
  return gram;
}

LatticeElement quadratic_form(const std::vector<std::vector<LatticeElement>>& m, std::span<const double> xi) {
  if (m.size() != xi.size()) throw DimensionMismatch(m.size(), xi.size());
  if (m.empty()) throw InvalidArgument("quadratic form of an empty matrix");
  LatticeElement acc = LatticeElement::zero(m[0][0].dim());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) acc += (xi[i] * xi[j]) * m[i][j];
  return acc;
}

PsdReport check_order_psd(const LambdaGram& gram, std::size_t n_xi, std::uint64_t seed, double tol) {
  PsdReport report;
  report.min_eigenvalue = gram.min_eigenvalue();
  report.spectral_threshold = -tol * (1.0 + gram.max_abs_entry());
  report.spectral_pass = report.min_eigenvalue >= report.spectral_threshold;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> xi(gram.size());
  report.worst_form = 0.0;
  report.sampled_pass = true;
  for (std::size_t s = 0; s < n_xi; ++s) {
    for (double& v : xi) v = normal(rng);
    const double worst = quadratic_form(gram.entries, xi).min();
    report.worst_form = std::min(report.worst_form, worst);
    if (worst < -tol) report.sampled_pass = false;
  }
  report.samples = n_xi;
  return report;
}

namespace {

// Shared by both probe modes so that the substitution identity between
// them is exact in floating point.
LatticeElement form_on_arguments(const ParametricMap& h, std::span<const double> xi,
                                 const std::function<double(std::size_t, std::size_t)>& arg) {
  const std::size_t n = xi.size();
  std::vector<std::vector<LatticeElement>> m(n, std::vector<LatticeElement>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = h(arg(i, j));
  return quadratic_form(m, xi);
}

}  // namespace

ProbeResult exp_convexity_probe(const ParametricMap& h, std::span<const double> x, std::span<const double> xi,
                                ProbeMode mode, const Interval& domain, const OrderTolerance& tol) {
  if (x.size() != xi.size()) throw DimensionMismatch(x.size(), xi.size());
  if (x.empty()) throw InvalidArgument("probe needs at least one point");
  if (mode == ProbeMode::Sum) {
    for (double a : x)
      for (double b : x)
        if (!domain.contains(a + b))
          throw DomainViolation("x_i + x_j = " + detail::num(a + b) + " outside the domain interval");
  } else {
    for (double a : x)
      if (!domain.contains(a)) throw DomainViolation("x_i = " + detail::num(a) + " outside the domain interval");
  }
  auto arg = [&x, mode](std::size_t i, std::size_t j) {
    return mode == ProbeMode::Sum ? x[i] + x[j] : (x[i] + x[j]) / 2.0;
  };
  ProbeResult result;
  result.form = form_on_arguments(h, xi, arg);
  result.verdict = partial_leq(LatticeElement::zero(result.form.dim()), result.form, tol);
  return result;
}

EquivalenceReport midpoint_equivalence_check(const ParametricMap& h, std::span<const double> x,
                                             std::span<const double> xi, const Interval& domain, double tol) {
  std::vector<double> doubled(x.begin(), x.end());
  std::vector<double> halved(x.begin(), x.end());
  for (double& v : doubled) v *= 2.0;
  for (double& v : halved) v /= 2.0;

  EquivalenceReport report;
  const auto sum = exp_convexity_probe(h, x, xi, ProbeMode::Sum, domain).form;
  const auto mid_doubled = exp_convexity_probe(h, doubled, xi, ProbeMode::Midpoint, domain).form;
  report.sum_to_midpoint_defect = lattice_norm(sum - mid_doubled);

  const auto mid = exp_convexity_probe(h, x, xi, ProbeMode::Midpoint, domain).form;
  const auto sum_halved = exp_convexity_probe(h, halved, xi, ProbeMode::Sum, domain).form;
  report.midpoint_to_sum_defect = lattice_norm(mid - sum_halved);

  report.pass = report.sum_to_midpoint_defect <= tol && report.midpoint_to_sum_defect <= tol;
  return report;
}

ParametricMap lambda_map(const Generator& gen, const LatticeElement& f, FamilyKind kind, double t,
                         const LambdaOptions& opts) {
  if (opts.require_normalized && !gen.conservative()) throw NotNormalized(gen.name());
  return [gen, z = evolve(gen, t), f, kind, opts](double p) {
    return lambda_residual(gen, z, f, kind, p, opts);
  };
}

std::vector<double> continuity_sweep(const ParametricMap& h, std::span<const double> p_grid,
                                     std::span<const double> steps) {
  std::vector<double> moduli;
  moduli.reserve(steps.size());
  for (double d : steps) {
    double worst = 0.0;
    for (double p : p_grid) worst = std::max(worst, lattice_norm(h(p + d) - h(p)));
    moduli.push_back(worst);
  }
  return moduli;
}

void to_json(nlohmann::json& j, const LambdaGram& g) {
  j = nlohmann::json{{"p", g.p},
                     {"t", g.t},
                     {"family_kind", g.kind == FamilyKind::F ? "F" : "H"},
                     {"coupled", g.coupled}};
  auto coords = nlohmann::json::array();
  for (std::size_t k = 0; k < g.coordinate_matrices.size(); ++k) {
    const Matrix& m = g.coordinate_matrices[k];
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index c = 0; c < m.cols(); ++c) rows[static_cast<std::size_t>(i)].push_back(m(i, c));
    coords.push_back({{"index", k}, {"matrix", rows}, {"min_eig", g.min_eigenvalues[k]}});
  }
  j["coordinates"] = std::move(coords);
}

void to_json(nlohmann::json& j, const PsdReport& r) {
  j = nlohmann::json{{"spectral_pass", r.spectral_pass},     {"min_eigenvalue", r.min_eigenvalue},
                     {"spectral_threshold", r.spectral_threshold}, {"sampled_pass", r.sampled_pass},
                     {"worst_form", r.worst_form},           {"samples", r.samples}};
}

void write_gram_csv(std::ostream& os, const LambdaGram& g) {
  os << "p_i,p_j,coordinate,value\n";
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      for (std::size_t k = 0; k < g.dim(); ++k)
        os << g.p[i] << ',' << g.p[j] << ',' << k << ',' << g.entries[i][j][k] << '\n';
  os.precision(old);
}

}  // namespace possemi
