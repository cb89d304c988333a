#include "possemi/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "possemi/errors.hpp"

namespace possemi {

namespace {

void require_finite(const std::vector<double>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw NonFiniteValue(i);
  }
}

template <typename Op>
LatticeElement zip(const LatticeElement& f, const LatticeElement& g, Op op) {
  require_same_dim(f, g);
  std::vector<double> out(f.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(f[i], g[i]);
  return LatticeElement(std::move(out));
}

}  // namespace

std::string_view to_string(Ordering o) {
  switch (o) {
    case Ordering::Leq: return "LEQ";
    case Ordering::Geq: return "GEQ";
    case Ordering::Equal: return "EQUAL";
    case Ordering::Incomparable: return "INCOMPARABLE";
  }
  return "?";
}

LatticeElement::LatticeElement(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_);
}

LatticeElement::LatticeElement(std::initializer_list<double> values) : values_(values) {
  require_finite(values_);
}

LatticeElement LatticeElement::zero(std::size_t dim) { return constant(dim, 0.0); }
LatticeElement LatticeElement::unit(std::size_t dim) { return constant(dim, 1.0); }
LatticeElement LatticeElement::constant(std::size_t dim, double c) {
  return LatticeElement(std::vector<double>(dim, c));
}

double LatticeElement::min() const { return *std::min_element(values_.begin(), values_.end()); }
double LatticeElement::max() const { return *std::max_element(values_.begin(), values_.end()); }

LatticeElement& LatticeElement::operator+=(const LatticeElement& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  require_finite(values_);
  return *this;
}

LatticeElement& LatticeElement::operator-=(const LatticeElement& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  require_finite(values_);
  return *this;
}

LatticeElement& LatticeElement::operator*=(double s) {
  for (double& v : values_) v *= s;
  require_finite(values_);
  return *this;
}

LatticeElement operator+(LatticeElement a, const LatticeElement& b) { return a += b; }
LatticeElement operator-(LatticeElement a, const LatticeElement& b) { return a -= b; }
LatticeElement operator-(const LatticeElement& a) { return -1.0 * a; }
LatticeElement operator*(double s, LatticeElement a) { return a *= s; }
LatticeElement operator*(LatticeElement a, double s) { return a *= s; }

LatticeAlgebra::LatticeAlgebra(std::size_t d, std::vector<std::string> l)
    : dim(d), labels(std::move(l)) {
  if (dim == 0) throw InvalidArgument("lattice algebra dimension must be >= 1");
  if (!labels.empty() && labels.size() != dim) throw DimensionMismatch(labels.size(), dim);
}

void require_same_dim(const LatticeElement& f, const LatticeElement& g) {
  if (f.dim() != g.dim()) throw DimensionMismatch(f.dim(), g.dim());
}

LatticeElement join(const LatticeElement& f, const LatticeElement& g) {
  return zip(f, g, [](double a, double b) { return std::max(a, b); });
}

LatticeElement meet(const LatticeElement& f, const LatticeElement& g) {
  return zip(f, g, [](double a, double b) { return std::min(a, b); });
}

LatticeElement abs_val(const LatticeElement& f) { return join(f, -f); }
LatticeElement pos_part(const LatticeElement& f) { return join(f, LatticeElement::zero(f.dim())); }
LatticeElement neg_part(const LatticeElement& f) { return join(-f, LatticeElement::zero(f.dim())); }

double lattice_norm(const LatticeElement& f) {
  double n = 0.0;
  for (double v : f.values()) n = std::max(n, std::abs(v));
  return n;
}

LatticeElement multiply(const LatticeElement& f, const LatticeElement& g) {
  return zip(f, g, [](double a, double b) { return a * b; });
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

Ordering partial_leq(const LatticeElement& f, const LatticeElement& g, const OrderTolerance& tol) {
  require_same_dim(f, g);
  const double eps = tol.epsilon(std::max(lattice_norm(f), lattice_norm(g)));
  bool f_above = false;  // some f_i > g_i + eps
  bool g_above = false;  // some g_j > f_j + eps
  for (std::size_t i = 0; i < f.dim(); ++i) {
    const double d = g[i] - f[i];
    if (d < -eps) f_above = true;
    if (d > eps) g_above = true;
  }
  if (f_above && g_above) return Ordering::Incomparable;
  if (f_above) return Ordering::Geq;
  if (g_above) return Ordering::Leq;
  return Ordering::Equal;
}

bool is_positive(const LatticeElement& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return v >= 0.0; });
}

void to_json(nlohmann::json& j, const LatticeElement& f) { j = f.vector(); }

void from_json(const nlohmann::json& j, LatticeElement& f) {
  if (!j.is_array()) throw InvalidArgument("lattice element must be a JSON array");
  f = LatticeElement(j.get<std::vector<double>>());
}

void to_json(nlohmann::json& j, const LatticeAlgebra& a) {
  j = nlohmann::json{{"dim", a.dim}, {"labels", a.labels}};
}

void from_json(const nlohmann::json& j, LatticeAlgebra& a) {
  a = LatticeAlgebra(j.at("dim").get<std::size_t>(),
                     j.value("labels", std::vector<std::string>{}));
}

}  // namespace possemi
