#pragma once

// Convex operator families on the commutative algebra, evaluated through
// the pointwise functional calculus:
//
//   F_t(f) = f^t / (t(t-1))   t not in {0, 1}      D^2 F_t(f) = f^(t-2)
//   F_0(f) = -log f                                 D^2 F_0(f) = f^-2
//   F_1(f) = f log f                                D^2 F_1(f) = f^-1
//   H_t(f) = exp(tf) / t^2    t != 0                D^2 H_t(f) = exp(tf)
//   H_0(f) = f^2 / 2                                D^2 H_0(f) = 1

#include <cstddef>
#include <functional>
#include <string>
#include <type_traits>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "possemi/lattice.hpp"

namespace possemi {

struct PowerF {
  double t;
};
struct NegLog {};
struct Entropy {};
struct ExpH {
  double t;
};
struct HalfSquare {};

/// A user-supplied pointwise map. The analytic second derivative is
/// mandatory so the second-derivative criterion can be checked.
struct Custom {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> second;
  /// Optional; required by support_line_check.
  std::function<double(double)> first;
  /// Inputs must be strictly positive.
  bool positive_domain = false;
};

class OperatorFamily {
 public:
  using Tag = std::variant<PowerF, NegLog, Entropy, ExpH, HalfSquare, Custom>;

  OperatorFamily(Tag tag);  // NOLINT(google-explicit-constructor)
  template <typename Alt>
    requires std::is_constructible_v<Tag, Alt> && (!std::is_same_v<std::decay_t<Alt>, Tag>)
  OperatorFamily(Alt alt)  // NOLINT(google-explicit-constructor)
      : OperatorFamily(Tag(std::move(alt))) {}

  /// F_p with the t=0 and t=1 branches dispatched exactly on equality.
  static OperatorFamily f_family(double p);
  /// H_p with the p=0 branch dispatched exactly on equality.
  static OperatorFamily h_family(double p);
  static OperatorFamily identity();

  const Tag& tag() const noexcept { return tag_; }
  std::string name() const;
  bool requires_positive() const;

  double value(double x) const;
  double first(double x) const;
  double second(double x) const;
  bool has_first() const;

  /// Throws NonPositiveInput or Overflow when f leaves the domain.
  void check_domain(const LatticeElement& f) const;

  LatticeElement eval(const LatticeElement& f) const;
  LatticeElement derivative(const LatticeElement& f) const;
  /// Coefficient of the bilinear action: D^2 phi(f)(h, h) = second(f) * h^2.
  LatticeElement second_derivative(const LatticeElement& f) const;

 private:
  Tag tag_;
};

/// Strictly-positive threshold used by the F family.
inline constexpr double kPositiveFloor = 1e-12;
/// exp overflow guard for the H family: t*f must stay below this.
inline constexpr double kExpArgumentCap = 700.0;

struct LogSeriesConfig {
  double tol = 1e-14;
  std::size_t max_terms = 1'000'000;
  double radius_margin = 0.1;
};

/// log(f) = -sum_{n>=1} (e - f)^n / n, summed until the term norm drops
/// below cfg.tol. Requires |e - f| <= 1 - radius_margin.
LatticeElement log_series(const LatticeElement& f, const LogSeriesConfig& cfg = {});

/// Sup-norm defect between the central second difference
/// [phi(f+eh) - 2phi(f) + phi(f-eh)] / e^2 and second(f) * h^2.
/// Throws InvalidArgument when step < 1e-6 or h is zero.
double second_derivative_check(const OperatorFamily& fam, const LatticeElement& f,
                               const LatticeElement& h, double step);

using PointwiseMap = std::function<LatticeElement(const LatticeElement&)>;

/// Verdict of phi(lf + (1-l)g) against l phi(f) + (1-l) phi(g).
Ordering convexity_probe(const PointwiseMap& phi, const LatticeElement& f, const LatticeElement& g,
                         double lambda, const OrderTolerance& tol = {});
Ordering convexity_probe(const OperatorFamily& fam, const LatticeElement& f, const LatticeElement& g,
                         double lambda, const OrderTolerance& tol = {});

/// {"family":"PowerF","t":2.5} and friends. Custom families are not
/// serializable.
void to_json(nlohmann::json& j, const OperatorFamily& fam);
OperatorFamily family_from_json(const nlohmann::json& j);

}  // namespace possemi
