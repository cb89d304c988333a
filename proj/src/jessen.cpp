#include "possemi/jessen.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "possemi/errors.hpp"

namespace possemi {

JessenReport verify_jessen(const Generator& gen, const OperatorFamily& phi, const LatticeElement& f,
                           double t, const JessenOptions& opts) {
  if (opts.require_normalized && !gen.conservative()) throw NotNormalized(gen.name());
  return verify_jessen(gen, evolve(gen, t), phi, f, opts);
}

JessenReport verify_jessen(const Generator& gen, const SemigroupOperator& z, const OperatorFamily& phi,
                           const LatticeElement& f, const JessenOptions& opts) {
  if (opts.require_normalized && !gen.conservative()) throw NotNormalized(gen.name());
  const LatticeElement zf = z.apply(f);
  const LatticeElement lhs = phi.eval(zf);
  const LatticeElement rhs = z.apply(phi.eval(f));
  JessenReport report;
  report.residual = rhs - lhs;
  report.verdict = partial_leq(lhs, rhs, opts.tol);
  report.min_slack = report.residual.min();
  report.t = z.t;
  report.family = phi.name();
  report.generator = gen.name();
  return report;
}

Ordering support_line_check(const OperatorFamily& phi, const LatticeElement& f, const LatticeElement& f0,
                            const OrderTolerance& tol) {
  require_same_dim(f, f0);
  const LatticeElement support = phi.eval(f0) + multiply(phi.derivative(f0), f - f0);
  return partial_leq(support, phi.eval(f), tol);
}

DualVector::DualVector(std::vector<double> values) : values_(std::move(values)), positive_(true) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw NonFiniteValue(i);
    if (values_[i] < 0.0) positive_ = false;
  }
}

std::function<double(const LatticeElement&)> pseudo_adjoint(const OperatorFamily& phi,
                                                            const DualVector& fstar) {
  return [phi, fstar](const LatticeElement& x) { return fstar(phi.eval(x)); };
}

AdjointReport verify_adjoint_pairing(const Generator& gen, const OperatorFamily& phi, const DualVector& fstar,
                                     const LatticeElement& f, double t, const AdjointOptions& opts) {
  if (opts.require_normalized && !gen.conservative()) throw NotNormalized(gen.name());
  return verify_adjoint_pairing(gen, evolve(gen, t), phi, fstar, f, opts);
}

AdjointReport verify_adjoint_pairing(const Generator& gen, const SemigroupOperator& z,
                                     const OperatorFamily& phi, const DualVector& fstar,
                                     const LatticeElement& f, const AdjointOptions& opts) {
  if (opts.require_normalized && !gen.conservative()) throw NotNormalized(gen.name());
  if (opts.require_positive && !fstar.positive()) {
    for (std::size_t i = 0; i < fstar.dim(); ++i)
      if (fstar.values()[i] < 0.0) throw NonPositiveDual(i);
  }
  if (fstar.dim() != f.dim()) throw DimensionMismatch(fstar.dim(), f.dim());

  AdjointReport report;
  const double adjoint_side = dot(z.apply_adjoint(fstar.values()), f.values());
  const double direct_side = fstar(z.apply(f));
  report.transpose_defect = std::abs(adjoint_side - direct_side);

  const LatticeElement zf = z.apply(f);
  const LatticeElement rhs = z.apply(phi.eval(f));
  const LatticeElement lhs = phi.eval(zf);
  report.pairing_gap = fstar(rhs) - fstar(lhs);
  report.residual_pairing = fstar(rhs - lhs);

  report.checks.checks.push_back({"transpose_identity", report.transpose_defect <= opts.transpose_tol,
                                  report.transpose_defect, opts.transpose_tol, "<Z^T f*, f> = <f*, Z f>"});
  report.checks.checks.push_back({"weak_adjoint_inequality", report.pairing_gap >= -opts.gap_tol,
                                  std::max(0.0, -report.pairing_gap), opts.gap_tol,
                                  "<f*, Z(phi f)> >= <f*, phi(Z f)>"});
  return report;
}

double pairing_linearity_defect(const OperatorFamily& phi, const DualVector& a, const DualVector& b,
                                double lambda, const LatticeElement& x) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
  std::vector<double> mix(a.dim());
  for (std::size_t i = 0; i < mix.size(); ++i)
    mix[i] = lambda * a.values()[i] + (1.0 - lambda) * b.values()[i];
  const LatticeElement px = phi.eval(x);
  return std::abs(DualVector(std::move(mix))(px) - lambda * a(px) - (1.0 - lambda) * b(px));
}

double pseudo_adjoint_convexity_slack(const OperatorFamily& phi, const DualVector& fstar,
                                      const LatticeElement& x, const LatticeElement& y, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("convexity weight must lie in [0, 1]");
  const auto functional = pseudo_adjoint(phi, fstar);
  return lambda * functional(x) + (1.0 - lambda) * functional(y) -
         functional(lambda * x + (1.0 - lambda) * y);
}

Box Box::cube(std::size_t dim, double lo, double hi) {
  return Box{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

LipschitzEstimate lipschitz_norm_estimate(const PointwiseMap& phi, const Box& box, std::size_t n_samples,
                                          std::uint64_t seed) {
  if (n_samples < 2) throw InvalidArgument("Lipschitz estimate needs at least 2 samples");
  if (box.lo.empty() || box.lo.size() != box.hi.size()) throw InvalidArgument("degenerate box");
  for (std::size_t i = 0; i < box.lo.size(); ++i)
    if (!(box.lo[i] < box.hi[i])) throw InvalidArgument("degenerate box");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&]() {
    std::vector<double> v(box.lo.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    return LatticeElement(std::move(v));
  };

  LipschitzEstimate est;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const LatticeElement x = draw();
    const LatticeElement y = draw();
    const double dist = lattice_norm(x - y);
    if (dist == 0.0) continue;
    est.value = std::max(est.value, lattice_norm(phi(x) - phi(y)) / dist);
    ++est.pairs;
  }
  return est;
}

LipschitzEstimate lipschitz_norm_estimate(const OperatorFamily& phi, const Box& box, std::size_t n_samples,
                                          std::uint64_t seed) {
  return lipschitz_norm_estimate([&phi](const LatticeElement& x) { return phi.eval(x); }, box, n_samples,
                                 seed);
}

void to_json(nlohmann::json& j, const JessenReport& r) {
  j = nlohmann::json{{"generator", r.generator}, {"family", r.family},   {"t", r.t},
                     {"verdict", to_string(r.verdict)}, {"min_slack", r.min_slack},
                     {"residual", r.residual}};
}

void to_json(nlohmann::json& j, const AdjointReport& r) {
  j = nlohmann::json{{"transpose_defect", r.transpose_defect},
                     {"pairing_gap", r.pairing_gap},
                     {"residual_pairing", r.residual_pairing},
                     {"checks", r.checks}};
}

}  // namespace possemi
