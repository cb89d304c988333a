#include "possemi/examples_repro.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "possemi/errors.hpp"

namespace possemi {

namespace {

constexpr double kGridAlignTol = 1e-9;

long aligned_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const double rounded = std::round(r);
  if (!std::isfinite(r) || std::abs(r - rounded) > kGridAlignTol)
    throw InvalidArgument(std::string(what) + " is not an integer multiple of the grid step");
  return static_cast<long>(rounded);
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

}  // namespace

LatticeElement mirror(const LatticeElement& f) {
  std::vector<double> v(f.values().rbegin(), f.values().rend());
  return LatticeElement(std::move(v));
}

ShiftScene::ShiftScene(double t, double half_width, double step)
    : t_(t), half_width_(half_width), step_(step), center_(0), shift_(0) {
  if (!(step > 0.0) || !(half_width > 0.0)) throw InvalidArgument("grid step and half-width must be positive");
  if (!(t >= 0.0)) throw InvalidArgument("shift amount must be nonnegative");
  if (!(t < half_width)) throw InvalidArgument("shift amount must be smaller than the half-width");
  center_ = static_cast<std::size_t>(aligned_ratio(half_width, step, "half-width"));
  shift_ = aligned_ratio(t, step, "shift amount");
}

double ShiftScene::coord(std::size_t k) const {
  return static_cast<double>(static_cast<long>(k) - static_cast<long>(center_)) * step_;
}

LatticeElement ShiftScene::bell() const {
  std::vector<double> v(size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::exp(-coord(k) * coord(k));
  return LatticeElement(std::move(v));
}

LatticeElement ShiftScene::shift_apply(const LatticeElement& g) const {
  if (g.dim() != size()) throw DimensionMismatch(g.dim(), size());
  std::vector<double> v(size(), 0.0);
  for (std::size_t k = 0; k + static_cast<std::size_t>(shift_) < size(); ++k)
    v[k] = g[k + static_cast<std::size_t>(shift_)];
  return LatticeElement(std::move(v));
}

Matrix ShiftScene::shift_matrix() const {
  const auto n = static_cast<Eigen::Index>(size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k + shift_ < n; ++k) m(k, k + shift_) = 1.0;
  return m;
}

bool ShiftScene::interior(std::size_t k) const {
  const long offset = std::labs(static_cast<long>(k) - static_cast<long>(center_));
  return offset + shift_ <= static_cast<long>(center_);
}

RotationScene::RotationScene(long k, std::size_t points) : k_(k), n_(points) {
  if (points < 3) throw InvalidArgument("rotation scene needs at least 3 points");
  if (k < 0) throw InvalidArgument("rotation steps must be nonnegative");
}

double RotationScene::t() const {
  return 2.0 * std::numbers::pi * static_cast<double>(k_) / static_cast<double>(n_);
}

double RotationScene::angle(std::size_t j) const {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_);
}

LatticeElement RotationScene::curve() const {
  std::vector<double> v(n_);
  for (std::size_t j = 0; j < n_; ++j) v[j] = std::cos(angle(std::min(j, n_ - j))) + 1.0;
  return LatticeElement(std::move(v));
}

LatticeElement RotationScene::rotate(const LatticeElement& g) const {
  if (g.dim() != n_) throw DimensionMismatch(g.dim(), n_);
  const auto shift = static_cast<std::size_t>(k_) % n_;
  std::vector<double> v(n_);
  for (std::size_t j = 0; j < n_; ++j) v[j] = g[(j + shift) % n_];
  return LatticeElement(std::move(v));
}

LatticeElement RotationScene::conjugate(const LatticeElement& g) const {
  if (g.dim() != n_) throw DimensionMismatch(g.dim(), n_);
  std::vector<double> v(n_);
  for (std::size_t j = 0; j < n_; ++j) v[j] = g[(n_ - j) % n_];
  return LatticeElement(std::move(v));
}

Matrix RotationScene::rotation_matrix() const {
  const auto n = static_cast<Eigen::Index>(n_);
  const auto shift = static_cast<Eigen::Index>(static_cast<std::size_t>(k_) % n_);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m(j, (j + shift) % n) = 1.0;
  return m;
}

ShiftReport run_shift_example(const ShiftScene& scene, const OrderTolerance& tol) {
  const LatticeElement f = scene.bell();
  const LatticeElement lhs = mirror(scene.shift_apply(f));
  const LatticeElement rhs = scene.shift_apply(mirror(f));

  ShiftReport report;
  report.t = scene.t();
  for (std::size_t k = 0; k < scene.size(); ++k) {
    report.curves.coord.push_back(scene.coord(k));
    report.curves.lhs.push_back(lhs[k]);
    report.curves.rhs.push_back(rhs[k]);
  }

  std::vector<double> lhs_in;
  std::vector<double> rhs_in;
  for (std::size_t k = 0; k < scene.size(); ++k) {
    if (!scene.interior(k)) continue;
    lhs_in.push_back(lhs[k]);
    rhs_in.push_back(rhs[k]);
    report.max_excess = std::max(report.max_excess, lhs[k] - rhs[k]);
    report.max_deficit = std::max(report.max_deficit, rhs[k] - lhs[k]);
  }
  report.verdict = partial_leq(LatticeElement(lhs_in), LatticeElement(rhs_in), tol);
  report.argmax_lhs = scene.coord(argmax(report.curves.lhs));
  report.argmax_rhs = scene.coord(argmax(report.curves.rhs));

  const auto at_t = static_cast<std::size_t>(static_cast<long>((scene.size() - 1) / 2) + scene.shift());
  report.lhs_at_t = lhs[at_t];
  report.rhs_at_t = rhs[at_t];
  return report;
}

RotationReport run_rotation_example(const RotationScene& scene, const OrderTolerance& tol) {
  const LatticeElement f = scene.curve();
  const LatticeElement lhs = scene.conjugate(scene.rotate(f));
  const LatticeElement rhs = scene.rotate(scene.conjugate(f));

  RotationReport report;
  report.k = scene.steps();
  report.t = scene.t();
  report.verdict = partial_leq(lhs, rhs, tol);
  for (std::size_t j = 0; j < scene.size(); ++j) {
    const double z = scene.angle(j);
    report.curves.coord.push_back(z);
    report.curves.lhs.push_back(lhs[j]);
    report.curves.rhs.push_back(rhs[j]);
    report.formula_defect = std::max(report.formula_defect, std::abs(lhs[j] - (std::cos(report.t - z) + 1.0)));
    report.formula_defect = std::max(report.formula_defect, std::abs(rhs[j] - (std::cos(report.t + z) + 1.0)));
    report.max_abs_difference = std::max(report.max_abs_difference, std::abs(lhs[j] - rhs[j]));
  }
  return report;
}

void write_curves_csv(std::ostream& os, const Curves& c) {
  const auto old = os.precision(17);
  os << "coord,phi_Zt_f,Zt_phi_f\n";
  for (std::size_t i = 0; i < c.coord.size(); ++i) os << c.coord[i] << ',' << c.lhs[i] << ',' << c.rhs[i] << '\n';
  os.precision(old);
}

void write_curves_svg(std::ostream& os, const Curves& c, const std::string& title) {
  constexpr double kWidth = 640.0;
  constexpr double kHeight = 400.0;
  constexpr double kMargin = 40.0;
  if (c.coord.empty()) throw InvalidArgument("no curve data to plot");

  const auto [xmin_it, xmax_it] = std::minmax_element(c.coord.begin(), c.coord.end());
  double ymin = std::min(*std::min_element(c.lhs.begin(), c.lhs.end()), *std::min_element(c.rhs.begin(), c.rhs.end()));
  double ymax = std::max(*std::max_element(c.lhs.begin(), c.lhs.end()), *std::max_element(c.rhs.begin(), c.rhs.end()));
  if (ymax == ymin) ymax = ymin + 1.0;
  const double xmin = *xmin_it;
  const double xspan = std::max(*xmax_it - xmin, 1e-300);
  auto px = [&](double x) { return kMargin + (x - xmin) / xspan * (kWidth - 2 * kMargin); };
  auto py = [&](double y) { return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin); };

  auto polyline = [&](const std::vector<double>& ys, const char* color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ys.size(); ++i) os << px(c.coord[i]) << ',' << py(ys[i]) << ' ';
    os << "\"/>\n";
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
     << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  polyline(c.lhs, "steelblue");
  polyline(c.rhs, "firebrick");
  os << "<text x=\"" << kMargin + 8 << "\" y=\"" << kMargin + 16
     << "\" font-size=\"12\" fill=\"steelblue\">phi(Z(t)f)</text>\n";
  os << "<text x=\"" << kMargin + 8 << "\" y=\"" << kMargin + 32
     << "\" font-size=\"12\" fill=\"firebrick\">Z(t)(phi f)</text>\n";
  os << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 12 << "\" font-size=\"11\">" << xmin << "</text>\n";
  os << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"end\" font-size=\"11\">"
     << *xmax_it << "</text>\n";
  os << "</svg>\n";
}

void to_json(nlohmann::json& j, const ShiftReport& r) {
  j = nlohmann::json{{"t", r.t},
                     {"verdict", to_string(r.verdict)},
                     {"argmax_lhs", r.argmax_lhs},
                     {"argmax_rhs", r.argmax_rhs},
                     {"lhs_at_t", r.lhs_at_t},
                     {"rhs_at_t", r.rhs_at_t},
                     {"max_excess", r.max_excess},
                     {"max_deficit", r.max_deficit}};
}

void to_json(nlohmann::json& j, const RotationReport& r) {
  j = nlohmann::json{{"k", r.k},
                     {"t", r.t},
                     {"verdict", to_string(r.verdict)},
                     {"formula_defect", r.formula_defect},
                     {"max_abs_difference", r.max_abs_difference}};
}

}  // namespace possemi
