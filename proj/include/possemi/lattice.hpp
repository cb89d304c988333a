#pragma once

// Concrete unital Banach lattice algebra: real vectors over a finite index
// set K with the componentwise order, pointwise product, unit e = (1,...,1)
// and the supremum norm. This is C(K) for a finite discrete K, so every
// lattice-algebra axiom holds exactly.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace possemi {

/// Tolerance for the floating-point order. Two elements compare LEQ when
/// min_i (g_i - f_i) >= -(atol + rtol * max(|f|, |g|)).
struct OrderTolerance {
  double atol = 1e-9;
  double rtol = 1e-12;

  double epsilon(double scale) const { return atol + rtol * scale; }
};

enum class Ordering { Leq, Geq, Equal, Incomparable };

std::string_view to_string(Ordering o);

/// True for Leq and Equal.
constexpr bool is_leq(Ordering o) { return o == Ordering::Leq || o == Ordering::Equal; }
constexpr bool is_geq(Ordering o) { return o == Ordering::Geq || o == Ordering::Equal; }

class LatticeElement {
 public:
  LatticeElement() = default;
  explicit LatticeElement(std::vector<double> values);
  LatticeElement(std::initializer_list<double> values);

  static LatticeElement zero(std::size_t dim);
  static LatticeElement unit(std::size_t dim);
  static LatticeElement constant(std::size_t dim, double c);

  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }

  double min() const;
  double max() const;

  LatticeElement& operator+=(const LatticeElement& other);
  LatticeElement& operator-=(const LatticeElement& other);
  LatticeElement& operator*=(double s);

  friend bool operator==(const LatticeElement&, const LatticeElement&) = default;

 private:
  std::vector<double> values_;
};

LatticeElement operator+(LatticeElement a, const LatticeElement& b);
LatticeElement operator-(LatticeElement a, const LatticeElement& b);
LatticeElement operator-(const LatticeElement& a);
LatticeElement operator*(double s, LatticeElement a);
LatticeElement operator*(LatticeElement a, double s);

/// Coordinate metadata. Elements carry only values; "same algebra" means
/// matching dimension.
struct LatticeAlgebra {
  std::size_t dim = 1;
  std::vector<std::string> labels;

  LatticeAlgebra() = default;
  explicit LatticeAlgebra(std::size_t dim, std::vector<std::string> labels = {});

  LatticeElement unit() const { return LatticeElement::unit(dim); }
  LatticeElement zero() const { return LatticeElement::zero(dim); }
  bool contains(const LatticeElement& f) const { return f.dim() == dim; }
};

void require_same_dim(const LatticeElement& f, const LatticeElement& g);

LatticeElement join(const LatticeElement& f, const LatticeElement& g);
LatticeElement meet(const LatticeElement& f, const LatticeElement& g);
LatticeElement abs_val(const LatticeElement& f);
LatticeElement pos_part(const LatticeElement& f);
LatticeElement neg_part(const LatticeElement& f);

/// Supremum norm max_i |f_i|.
double lattice_norm(const LatticeElement& f);

/// Pointwise product; the algebra multiplication.
LatticeElement multiply(const LatticeElement& f, const LatticeElement& g);

/// Sum_i a_i b_i, the pairing of V* = R^n with V.
double dot(std::span<const double> a, std::span<const double> b);

Ordering partial_leq(const LatticeElement& f, const LatticeElement& g, const OrderTolerance& tol = {});

/// Exact componentwise check f_i >= 0.
bool is_positive(const LatticeElement& f);

void to_json(nlohmann::json& j, const LatticeElement& f);
void from_json(const nlohmann::json& j, LatticeElement& f);
void to_json(nlohmann::json& j, const LatticeAlgebra& a);
void from_json(const nlohmann::json& j, LatticeAlgebra& a);

}  // namespace possemi
