#pragma once

// Grid discretizations of the two counterexamples: the left shift on
// C0(R) with the bell curve exp(-x^2), and the rotation group on C(circle)
// with f(z) = Re(z) + 1. In both, phi is the mirror x -> -x, an
// order-preserving involution, and the two sides of the Jessen inequality
// turn out incomparable.

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "possemi/lattice.hpp"
#include "possemi/semigroup.hpp"

namespace possemi {

struct Curves {
  std::vector<double> coord;
  /// phi(Z(t) f)
  std::vector<double> lhs;
  /// Z(t)(phi f)
  std::vector<double> rhs;
};

/// Reverses the coordinate order: the mirror of a grid symmetric about 0.
LatticeElement mirror(const LatticeElement& f);

class ShiftScene {
 public:
  /// Grid x_k = (k - m) h, k = 0..2m, m = L/h. Throws InvalidArgument when
  /// L/h or t/h is not an integer within 1e-9 or t < 0.
  ShiftScene(double t, double half_width = 6.0, double step = 0.05);

  double t() const noexcept { return t_; }
  double half_width() const noexcept { return half_width_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return 2 * center_ + 1; }
  long shift() const noexcept { return shift_; }
  double coord(std::size_t k) const;
  /// exp(-x^2) on the grid.
  LatticeElement bell() const;
  /// (Z(t)g)(x) = g(x + t), zero beyond the grid.
  LatticeElement shift_apply(const LatticeElement& g) const;
  /// Matrix of shift_apply; entrywise nonnegative with row sums <= 1.
  Matrix shift_matrix() const;
  /// Grid indices with |x| <= L - t.
  bool interior(std::size_t k) const;

 private:
  double t_;
  double half_width_;
  double step_;
  std::size_t center_;
  long shift_;
};

class RotationScene {
 public:
  /// Angles z_j = 2 pi j / N, rotation by k steps (t = 2 pi k / N).
  /// Throws InvalidArgument for N < 3 or k < 0.
  RotationScene(long k, std::size_t points = 360);

  long steps() const noexcept { return k_; }
  std::size_t size() const noexcept { return n_; }
  double t() const;
  double angle(std::size_t j) const;
  /// cos(z) + 1 sampled so that it is exactly mirror-symmetric on the grid.
  LatticeElement curve() const;
  /// (Z(t)g)(z) = g(z + t): cyclic index shift, an exact permutation.
  LatticeElement rotate(const LatticeElement& g) const;
  /// Index involution j -> -j mod N, the grid version of z -> conj(z).
  LatticeElement conjugate(const LatticeElement& g) const;
  Matrix rotation_matrix() const;

 private:
  long k_;
  std::size_t n_;
};

struct ShiftReport {
  double t = 0.0;
  Ordering verdict = Ordering::Equal;
  double argmax_lhs = 0.0;
  double argmax_rhs = 0.0;
  /// lhs and rhs evaluated at x = t.
  double lhs_at_t = 0.0;
  double rhs_at_t = 0.0;
  /// Largest amount by which lhs exceeds rhs, and rhs exceeds lhs, on the
  /// interior. Both are >= 0; both positive means the sides cross.
  double max_excess = 0.0;
  double max_deficit = 0.0;
  Curves curves;
};

struct RotationReport {
  long k = 0;
  double t = 0.0;
  Ordering verdict = Ordering::Equal;
  /// max |lhs - (cos(t - z) + 1)| and max |rhs - (cos(t + z) + 1)|.
  double formula_defect = 0.0;
  double max_abs_difference = 0.0;
  Curves curves;
};

ShiftReport run_shift_example(const ShiftScene& scene, const OrderTolerance& tol = {});
RotationReport run_rotation_example(const RotationScene& scene, const OrderTolerance& tol = {});

/// Header coord,phi_Zt_f,Zt_phi_f.
void write_curves_csv(std::ostream& os, const Curves& c);
/// Minimal two-line SVG plot of the curves.
void write_curves_svg(std::ostream& os, const Curves& c, const std::string& title);

void to_json(nlohmann::json& j, const ShiftReport& r);
void to_json(nlohmann::json& j, const RotationReport& r);

}  // namespace possemi
