#pragma once

// Positive semigroups Z(t) = exp(tQ) on R^n generated by Metzler matrices.
//
// In finite dimension the positive minimum principle for a generator is
// equivalent to nonnegative off-diagonal entries, and normalization
// Z(t)e = e is equivalent to zero row sums. exp(tQ) is computed by
// uniformization, which sums nonnegative matrices only, so positivity of
// the result holds by construction.

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "possemi/lattice.hpp"

namespace possemi {

using Matrix = Eigen::MatrixXd;

class Generator {
 public:
  /// Validates a Metzler matrix. Throws NotSquare, NonFiniteValue or
  /// NegativeOffDiagonal.
  static Generator validate(const Matrix& q, std::string name = "unnamed");

  const Matrix& q() const noexcept { return q_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(q_.rows()); }

  /// Row sums are zero within 1e-12.
  bool conservative() const noexcept { return conservative_; }
  /// Row sums are <= 1e-12; Z(t) is then a positive contraction.
  bool subconservative() const noexcept { return subconservative_; }

  /// Infinity norm (maximum absolute row sum).
  double norm() const;

  LatticeElement apply(const LatticeElement& f) const;

 private:
  Generator(Matrix q, std::string name, bool conservative, bool subconservative)
      : q_(std::move(q)), name_(std::move(name)), conservative_(conservative),
        subconservative_(subconservative) {}

  Matrix q_;
  std::string name_;
  bool conservative_;
  bool subconservative_;
};

struct EvolveOptions {
  /// Largest admissible t * |Q|_inf.
  double time_cap = 1e4;
  /// Relative size of the discarded Poisson tail.
  double tail_tol = 1e-16;
};

struct SemigroupOperator {
  Matrix matrix;
  double t = 0.0;
  /// Upper bound on the norm of the discarded uniformization tail.
  double trunc_error = 0.0;
  std::size_t terms = 0;

  LatticeElement apply(const LatticeElement& f) const;
  /// Z(t)^T x*, the adjoint action on V* = R^n.
  std::vector<double> apply_adjoint(std::span<const double> fstar) const;
};

/// exp(tQ) by uniformization. Throws InvalidArgument for t < 0 and Overflow
/// when t * |Q| exceeds the cap or the result is not finite.
SemigroupOperator evolve(const Generator& gen, double t, const EvolveOptions& opts = {});

/// Pade scaling-and-squaring exp(tQ). Used only to cross-check evolve.
Matrix expm_reference(const Matrix& q, double t);

/// One named pass/fail check with its measured defect.
struct Check {
  std::string name;
  bool pass = false;
  double defect = 0.0;
  double tol = 0.0;
  std::string note;
};

struct CheckReport {
  std::vector<Check> checks;

  bool all_pass() const;
  const Check& at(const std::string& name) const;
};

void to_json(nlohmann::json& j, const Check& c);
void to_json(nlohmann::json& j, const CheckReport& r);

/// Step sizes of the strong-continuity sweep, 1e-1 down to 1e-6.
std::vector<double> continuity_steps();

/// Composition law, Z(0) = I, and a strong-continuity trend over
/// h in continuity_steps(). The last one is a finite sweep, not a limit.
CheckReport check_semigroup_axioms(const Generator& gen, double s, double t, const LatticeElement& f,
                                   double tol = 1e-10);

/// Normalization Z(t)e = e, domination |Z(t)f| <= Z(t)|f| and the
/// contraction criterion |(Z(t)f)^+| <= |f^+|.
CheckReport check_positivity_and_normalization(const Generator& gen, double t, const LatticeElement& f,
                                               double tol = 1e-10);

/// |(Z(h) - I)f / h - Qf|, the difference-quotient defect; O(h).
double estimate_generator(const Generator& gen, double h, const LatticeElement& f);

void to_json(nlohmann::json& j, const Generator& g);
/// Accepts {"q": [[...]], "name": "..."}.
Generator generator_from_json(const nlohmann::json& j);

}  // namespace possemi
