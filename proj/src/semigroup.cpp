#include "possemi/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "possemi/errors.hpp"

namespace possemi {

namespace {

constexpr double kRowSumTol = 1e-12;

double inf_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::VectorXd as_eigen(const LatticeElement& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values().data(), static_cast<Eigen::Index>(f.dim()));
}

LatticeElement from_eigen(const Eigen::VectorXd& v) {
  return LatticeElement(std::vector<double>(v.data(), v.data() + v.size()));
}

void require_dim(const Matrix& m, const LatticeElement& f) {
  if (static_cast<std::size_t>(m.cols()) != f.dim())
    throw DimensionMismatch(static_cast<std::size_t>(m.cols()), f.dim());
}

}  // namespace

Generator Generator::validate(const Matrix& q, std::string name) {
  if (q.rows() != q.cols())
    throw NotSquare(static_cast<std::size_t>(q.rows()), static_cast<std::size_t>(q.cols()));
  if (q.rows() == 0) throw InvalidArgument("generator must be at least 1x1");
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (!std::isfinite(q(i, j))) throw NonFiniteValue(static_cast<std::size_t>(i * q.cols() + j));
      if (i != j && q(i, j) < 0.0)
        throw NegativeOffDiagonal(static_cast<std::size_t>(i), static_cast<std::size_t>(j), q(i, j));
    }
  }
  const Eigen::VectorXd rows = q.rowwise().sum();
  const bool conservative = rows.cwiseAbs().maxCoeff() <= kRowSumTol;
  const bool sub = rows.maxCoeff() <= kRowSumTol;
  return Generator(q, std::move(name), conservative, sub);
}

double Generator::norm() const { return inf_norm(q_); }

LatticeElement Generator::apply(const LatticeElement& f) const {
  require_dim(q_, f);
  return from_eigen(q_ * as_eigen(f));
}

LatticeElement SemigroupOperator::apply(const LatticeElement& f) const {
  require_dim(matrix, f);
  return from_eigen(matrix * as_eigen(f));
}

std::vector<double> SemigroupOperator::apply_adjoint(std::span<const double> fstar) const {
  if (static_cast<std::size_t>(matrix.rows()) != fstar.size())
    throw DimensionMismatch(static_cast<std::size_t>(matrix.rows()), fstar.size());
  const Eigen::Map<const Eigen::VectorXd> x(fstar.data(), static_cast<Eigen::Index>(fstar.size()));
  const Eigen::VectorXd y = matrix.transpose() * x;
  return {y.data(), y.data() + y.size()};
}

SemigroupOperator evolve(const Generator& gen, double t, const EvolveOptions& opts) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("evolve requires finite t >= 0");
  const Matrix& q = gen.q();
  const auto n = q.rows();
  const double qnorm = gen.norm();
  if (t * qnorm > opts.time_cap)
    throw Overflow("t*|Q| = " + detail::num(t * qnorm) + " exceeds cap " + detail::num(opts.time_cap));

  SemigroupOperator out{Matrix::Identity(n, n), t, 0.0, 1};
  if (t == 0.0 || qnorm == 0.0) return out;

  // Uniformization rate. P = I + Q/rate is entrywise nonnegative as long as
  // rate >= max(-q_ii); a Metzler matrix with a zero diagonal falls back to |Q|.
  double rate = q.diagonal().cwiseAbs().maxCoeff();
  if (rate == 0.0) rate = qnorm;
  const Matrix p = Matrix::Identity(n, n) + q / rate;
  const double growth = inf_norm(p);
  const double a = rate * t;
  const double log_a = std::log(a);

  Matrix power = Matrix::Identity(n, n);
  Matrix sum = Matrix::Zero(n, n);
  const double mean = a * growth;
  const auto max_terms = static_cast<std::size_t>(mean + 50.0 * std::sqrt(mean) + 1000.0);
  for (std::size_t k = 0;; ++k) {
    const double weight = std::exp(-a + static_cast<double>(k) * log_a - std::lgamma(k + 1.0));
    if (weight > 0.0) sum += weight * power;
    const double r = mean / static_cast<double>(k + 1);
    if (r < 1.0) {
      const double tail = weight * inf_norm(power) * r / (1.0 - r);
      if (tail <= opts.tail_tol * inf_norm(sum)) {
        out.trunc_error = tail;
        out.terms = k + 1;
        break;
      }
    }
    if (k >= max_terms) throw Overflow("uniformization did not converge within term budget");
    power = power * p;
  }
  if (!sum.allFinite()) throw Overflow("exp(tQ) is not finite");
  out.matrix = std::move(sum);
  return out;
}

Matrix expm_reference(const Matrix& q, double t) {
  const Matrix scaled = t * q;
  return scaled.exp();
}

bool CheckReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check& CheckReport::at(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw InvalidArgument("no check named " + name);
}

void to_json(nlohmann::json& j, const Check& c) {
  j = nlohmann::json{{"name", c.name}, {"pass", c.pass}, {"defect", c.defect}, {"tol", c.tol}};
  if (!c.note.empty()) j["note"] = c.note;
}

void to_json(nlohmann::json& j, const CheckReport& r) {
  j = nlohmann::json::array();
  for (const auto& c : r.checks) j.push_back(c);
}

std::vector<double> continuity_steps() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

CheckReport check_semigroup_axioms(const Generator& gen, double s, double t, const LatticeElement& f,
                                   double tol) {
  if (s < 0.0 || t < 0.0) throw InvalidArgument("semigroup times must be nonnegative");
  require_dim(gen.q(), f);
  CheckReport report;
  const auto n = static_cast<Eigen::Index>(gen.dim());

  const Matrix zs = evolve(gen, s).matrix;
  const Matrix zt = evolve(gen, t).matrix;
  const Matrix zst = evolve(gen, s + t).matrix;
  const double comp = inf_norm(zs * zt - zst);
  report.checks.push_back({"composition", comp <= tol, comp, tol, ""});

  const double ident = inf_norm(evolve(gen, 0.0).matrix - Matrix::Identity(n, n));
  report.checks.push_back({"identity_at_zero", ident <= tol, ident, tol, ""});

  // |Z(h)f - f| sampled on a decreasing h grid; roundoff floor of a few ulps.
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + lattice_norm(f));
  double previous = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (double h : continuity_steps()) {
    const double d = lattice_norm(evolve(gen, h).apply(f) - f);
    if (d > previous + floor) monotone = false;
    previous = d;
  }
  report.checks.push_back({"strong_continuity", monotone, previous, floor,
                           "finite h-sweep 1e-1..1e-6, trend only"});
  return report;
}

CheckReport check_positivity_and_normalization(const Generator& gen, double t, const LatticeElement& f,
                                               double tol) {
  require_dim(gen.q(), f);
  const SemigroupOperator z = evolve(gen, t);
  CheckReport report;

  const LatticeElement e = LatticeElement::unit(f.dim());
  const double norm_defect = lattice_norm(z.apply(e) - e);
  report.checks.push_back({"normalization", norm_defect <= tol, norm_defect, tol, "Z(t)e = e"});

  const LatticeElement lhs = abs_val(z.apply(f));
  const LatticeElement rhs = z.apply(abs_val(f));
  const double dom_defect = std::max(0.0, (lhs - rhs).max());
  const Ordering dom = partial_leq(lhs, rhs, OrderTolerance{tol, 1e-12});
  report.checks.push_back({"positivity", is_leq(dom), dom_defect, tol, "|Z(t)f| <= Z(t)|f|"});

  const double contraction = lattice_norm(pos_part(z.apply(f))) - lattice_norm(pos_part(f));
  report.checks.push_back(
      {"contraction", contraction <= tol, std::max(0.0, contraction), tol, "|(Z(t)f)+| <= |f+|"});
  return report;
}

double estimate_generator(const Generator& gen, double h, const LatticeElement& f) {
  if (!(h > 0.0)) throw InvalidArgument("difference quotient step must be positive");
  const LatticeElement quotient = (1.0 / h) * (evolve(gen, h).apply(f) - f);
  return lattice_norm(quotient - gen.apply(f));
}

void to_json(nlohmann::json& j, const Generator& g) {
  std::vector<std::vector<double>> rows(g.dim(), std::vector<double>(g.dim()));
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t k = 0; k < g.dim(); ++k)
      rows[i][k] = g.q()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
  j = nlohmann::json{{"name", g.name()}, {"q", rows}, {"conservative", g.conservative()}};
}

Generator generator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("q") || !j["q"].is_array())
    throw InvalidArgument("generator JSON must be an object with a 'q' matrix");
  const auto rows = j["q"].get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw InvalidArgument("generator matrix is empty");
  Matrix q(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      throw InvalidArgument("generator matrix rows have unequal length");
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return Generator::validate(q, j.value("name", std::string("unnamed")));
}

}  // namespace possemi
