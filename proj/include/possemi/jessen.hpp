#pragma once

// Verifiers for the Jessen-type inequality phi(Z(t)f) <= Z(t)(phi f) and
// for its adjoint form, which is checked in weak (pairing) form: for a
// nonlinear phi the pseudo-adjoint phi#(f*) = <f*, phi(.)> is a nonlinear
// functional rather than a vector of V*.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "possemi/lattice.hpp"
#include "possemi/operator_functions.hpp"
#include "possemi/semigroup.hpp"

namespace possemi {

struct JessenOptions {
  OrderTolerance tol{};
  /// Off only for negative-control experiments.
  bool require_normalized = true;
};

struct JessenReport {
  /// Z(t)(phi f) - phi(Z(t) f).
  LatticeElement residual;
  /// Verdict of phi(Z(t)f) against Z(t)(phi f).
  Ordering verdict = Ordering::Equal;
  double min_slack = 0.0;
  double t = 0.0;
  std::string family;
  std::string generator;

  bool holds() const { return is_leq(verdict); }
};

JessenReport verify_jessen(const Generator& gen, const OperatorFamily& phi, const LatticeElement& f,
                           double t, const JessenOptions& opts = {});
/// Same, reusing an already evolved Z(t).
JessenReport verify_jessen(const Generator& gen, const SemigroupOperator& z, const OperatorFamily& phi,
                           const LatticeElement& f, const JessenOptions& opts = {});

/// Verdict of the tangent estimate phi(f0) + phi'(f0)(f - f0) against phi(f).
/// Leq or Equal means the support inequality holds.
Ordering support_line_check(const OperatorFamily& phi, const LatticeElement& f, const LatticeElement& f0,
                            const OrderTolerance& tol = {});

/// An element of V* = R^n acting by the standard pairing.
class DualVector {
 public:
  explicit DualVector(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }
  bool positive() const noexcept { return positive_; }
  double operator()(const LatticeElement& f) const { return dot(values_, f.values()); }

 private:
  std::vector<double> values_;
  bool positive_;
};

/// x -> <f*, phi(x)>, the pseudo-adjoint of phi evaluated at f*.
std::function<double(const LatticeElement&)> pseudo_adjoint(const OperatorFamily& phi,
                                                            const DualVector& fstar);

struct AdjointOptions {
  double transpose_tol = 1e-12;
  double gap_tol = 1e-9;
  bool require_positive = true;
  bool require_normalized = true;
};

struct AdjointReport {
  /// |<Z(t)^T f*, f> - <f*, Z(t) f>|.
  double transpose_defect = 0.0;
  /// <f*, Z(t)(phi f)> - <f*, phi(Z(t) f)>.
  double pairing_gap = 0.0;
  /// <f*, residual> with the residual from verify_jessen.
  double residual_pairing = 0.0;
  CheckReport checks;
};

AdjointReport verify_adjoint_pairing(const Generator& gen, const OperatorFamily& phi, const DualVector& fstar,
                                     const LatticeElement& f, double t, const AdjointOptions& opts = {});
AdjointReport verify_adjoint_pairing(const Generator& gen, const SemigroupOperator& z,
                                     const OperatorFamily& phi, const DualVector& fstar,
                                     const LatticeElement& f, const AdjointOptions& opts = {});

/// |<l a* + (1-l) b*, phi(x)> - l<a*, phi(x)> - (1-l)<b*, phi(x)>|. The
/// pseudo-adjoint is affine in the dual slot, so this is roundoff only.
double pairing_linearity_defect(const OperatorFamily& phi, const DualVector& a, const DualVector& b,
                                double lambda, const LatticeElement& x);

/// l F(x) + (1-l) F(y) - F(l x + (1-l) y) for F = pseudo_adjoint(phi, f*).
/// Nonnegative whenever f* >= 0 and phi is convex.
double pseudo_adjoint_convexity_slack(const OperatorFamily& phi, const DualVector& fstar,
                                      const LatticeElement& x, const LatticeElement& y, double lambda);

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box cube(std::size_t dim, double lo, double hi);
};

struct LipschitzEstimate {
  /// Largest sampled difference quotient; a lower bound on [phi]_Lip.
  double value = 0.0;
  std::size_t pairs = 0;
  bool lower_bound = true;
};

/// Max of |phi(x) - phi(y)| / |x - y| over n_samples uniform pairs drawn
/// from the box. Pairs are drawn sequentially from the seed, so the
/// estimate is nondecreasing in n_samples.
LipschitzEstimate lipschitz_norm_estimate(const PointwiseMap& phi, const Box& box, std::size_t n_samples,
                                          std::uint64_t seed);
LipschitzEstimate lipschitz_norm_estimate(const OperatorFamily& phi, const Box& box, std::size_t n_samples,
                                          std::uint64_t seed);

void to_json(nlohmann::json& j, const JessenReport& r);
void to_json(nlohmann::json& j, const AdjointReport& r);

}  // namespace possemi
