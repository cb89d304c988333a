#pragma once

// Exponential convexity of the Jessen residual
//
//   Lambda_p = Z(t)(F_p(f)) - F_p(Z(t) f)
//
// as a function of the family exponent p. A V-valued matrix M is
// order-PSD when sum_ij xi_i xi_j M_ij >= 0 for every real xi; in the
// componentwise order that is equivalent to every coordinate slice being a
// PSD real symmetric matrix.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "possemi/jessen.hpp"
#include "possemi/lattice.hpp"
#include "possemi/operator_functions.hpp"
#include "possemi/semigroup.hpp"

namespace possemi {

enum class FamilyKind { F, H };

/// Midpoints closer than this to 0 or 1 (but not equal) are rejected for F:
/// the 1/(t(t-1)) factor there amplifies the residual's cancellation error
/// by more than six digits.
inline constexpr double kSingularityGuard = 1e-6;

/// Family member at exponent p; F dispatches exact 0 and 1 to NegLog and
/// Entropy and throws IllConditionedMidpoint near them.
OperatorFamily family_member(FamilyKind kind, double p);

struct ExponentSet {
  std::vector<double> p;
  FamilyKind kind = FamilyKind::F;

  std::size_t size() const noexcept { return p.size(); }
  double midpoint(std::size_t i, std::size_t j) const { return 0.5 * (p[i] + p[j]); }
  /// Throws InvalidArgument for empty/non-finite sets and
  /// IllConditionedMidpoint for F-midpoints near {0, 1}.
  void validate() const;
};

struct LambdaOptions {
  bool require_normalized = true;
};

LatticeElement lambda_residual(const Generator& gen, const LatticeElement& f, FamilyKind kind, double p,
                               double t, const LambdaOptions& opts = {});
LatticeElement lambda_residual(const Generator& gen, const SemigroupOperator& z, const LatticeElement& f,
                               FamilyKind kind, double p, const LambdaOptions& opts = {});

struct LambdaGram {
  std::vector<double> p;
  double t = 0.0;
  FamilyKind kind = FamilyKind::F;
  bool coupled = false;
  /// entries[i][j] = Lambda at (p_i + p_j) / 2.
  std::vector<std::vector<LatticeElement>> entries;
  /// One symmetric n_p x n_p matrix per lattice coordinate.
  std::vector<Matrix> coordinate_matrices;
  std::vector<double> min_eigenvalues;

  std::size_t size() const noexcept { return p.size(); }
  std::size_t dim() const noexcept { return coordinate_matrices.size(); }
  double max_abs_entry() const;
  double min_eigenvalue() const;
};

struct GramOptions {
  bool require_normalized = true;
  /// Coupled reading: entry (i,j) uses semigroup time p_ij as well. Reported,
  /// not covered by the theorem.
  bool coupled = false;
};

LambdaGram build_gram(const Generator& gen, const LatticeElement& f, double t, const ExponentSet& pset,
                      const GramOptions& opts = {});

struct PsdReport {
  bool spectral_pass = false;
  double min_eigenvalue = 0.0;
  /// -tol * (1 + max|entry|).
  double spectral_threshold = 0.0;
  bool sampled_pass = false;
  /// Smallest coordinate of any sampled quadratic form.
  double worst_form = 0.0;
  std::size_t samples = 0;

  bool pass() const { return spectral_pass && sampled_pass; }
};

PsdReport check_order_psd(const LambdaGram& gram, std::size_t n_xi, std::uint64_t seed, double tol = 1e-8);

/// sum_ij xi_i xi_j M_ij for a V-valued symmetric matrix.
LatticeElement quadratic_form(const std::vector<std::vector<LatticeElement>>& m, std::span<const double> xi);

using ParametricMap = std::function<LatticeElement(double)>;

enum class ProbeMode { Sum, Midpoint };

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct ProbeResult {
  LatticeElement form;
  /// Verdict of 0 against the form; Leq or Equal means the form is >= 0.
  Ordering verdict = Ordering::Equal;
  bool holds() const { return is_leq(verdict); }
};

/// Sum mode evaluates H(x_i + x_j), midpoint mode H((x_i + x_j) / 2).
ProbeResult exp_convexity_probe(const ParametricMap& h, std::span<const double> x, std::span<const double> xi,
                                ProbeMode mode, const Interval& domain = {}, const OrderTolerance& tol = {});

struct EquivalenceReport {
  /// |SUM({x}) - MIDPOINT({2x})|.
  double sum_to_midpoint_defect = 0.0;
  /// |MIDPOINT({x}) - SUM({x/2})|.
  double midpoint_to_sum_defect = 0.0;
  bool pass = false;
};

EquivalenceReport midpoint_equivalence_check(const ParametricMap& h, std::span<const double> x,
                                             std::span<const double> xi, const Interval& domain = {},
                                             double tol = 1e-12);

/// p -> Lambda_p with Z(t) evolved once.
ParametricMap lambda_map(const Generator& gen, const LatticeElement& f, FamilyKind kind, double t,
                         const LambdaOptions& opts = {});

/// max_p |H(p + d) - H(p)| for each step d. Diagnostic only.
std::vector<double> continuity_sweep(const ParametricMap& h, std::span<const double> p_grid,
                                     std::span<const double> steps);

void to_json(nlohmann::json& j, const LambdaGram& g);
void to_json(nlohmann::json& j, const PsdReport& r);
/// Rows of p_i,p_j,coordinate,value.
void write_gram_csv(std::ostream& os, const LambdaGram& g);

}  // namespace possemi
