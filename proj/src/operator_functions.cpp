#include "possemi/operator_functions.hpp"

#include <cmath>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "possemi/errors.hpp"

namespace possemi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Callers have already checked x > 0, so pow never sees the negative branch.
double power(double x, double t) { return std::pow(x, t); }

void validate_tag(const OperatorFamily::Tag& tag) {
  std::visit(overloaded{
                 [](const PowerF& p) {
                   if (!std::isfinite(p.t) || p.t == 0.0 || p.t == 1.0)
                     throw InvalidArgument("PowerF requires finite t outside {0, 1}");
                 },
                 [](const ExpH& h) {
                   if (!std::isfinite(h.t) || h.t == 0.0)
                     throw InvalidArgument("ExpH requires finite nonzero t");
                 },
                 [](const Custom& c) {
                   if (!c.value || !c.second)
                     throw InvalidArgument("custom family needs a map and its second derivative");
                 },
                 [](const auto&) {},
             },
             tag);
}

LatticeElement map_pointwise(const LatticeElement& f, const auto& fn) {
  std::vector<double> out(f.dim());
  for (std::size_t i = 0; i < f.dim(); ++i) out[i] = fn(f[i]);
  return LatticeElement(std::move(out));
}

}  // namespace

OperatorFamily::OperatorFamily(Tag tag) : tag_(std::move(tag)) { validate_tag(tag_); }

OperatorFamily OperatorFamily::f_family(double p) {
  if (p == 0.0) return NegLog{};
  if (p == 1.0) return Entropy{};
  return PowerF{p};
}

OperatorFamily OperatorFamily::h_family(double p) {
  if (p == 0.0) return HalfSquare{};
  return ExpH{p};
}

OperatorFamily OperatorFamily::identity() {
  return Custom{"identity", [](double x) { return x; }, [](double) { return 0.0; },
                [](double) { return 1.0; }, false};
}

std::string OperatorFamily::name() const {
  return std::visit(overloaded{
                        [](const PowerF& p) { return "PowerF(" + detail::num(p.t) + ")"; },
                        [](const NegLog&) { return std::string("NegLog"); },
                        [](const Entropy&) { return std::string("Entropy"); },
                        [](const ExpH& h) { return "ExpH(" + detail::num(h.t) + ")"; },
                        [](const HalfSquare&) { return std::string("HalfSquare"); },
                        [](const Custom& c) { return "Custom(" + c.name + ")"; },
                    },
                    tag_);
}

bool OperatorFamily::requires_positive() const {
  return std::visit(overloaded{
                        [](const PowerF&) { return true; },
                        [](const NegLog&) { return true; },
                        [](const Entropy&) { return true; },
                        [](const Custom& c) { return c.positive_domain; },
                        [](const auto&) { return false; },
                    },
                    tag_);
}

double OperatorFamily::value(double x) const {
  return std::visit(overloaded{
                        [x](const PowerF& p) { return power(x, p.t) / (p.t * (p.t - 1.0)); },
                        [x](const NegLog&) { return -std::log(x); },
                        [x](const Entropy&) { return x * std::log(x); },
                        [x](const ExpH& h) { return std::exp(h.t * x) / (h.t * h.t); },
                        [x](const HalfSquare&) { return 0.5 * x * x; },
                        [x](const Custom& c) { return c.value(x); },
                    },
                    tag_);
}

double OperatorFamily::first(double x) const {
  return std::visit(overloaded{
                        [x](const PowerF& p) { return power(x, p.t - 1.0) / (p.t - 1.0); },
                        [x](const NegLog&) { return -1.0 / x; },
                        [x](const Entropy&) { return std::log(x) + 1.0; },
                        [x](const ExpH& h) { return std::exp(h.t * x) / h.t; },
                        [x](const HalfSquare&) { return x; },
                        [x](const Custom& c) {
                          if (!c.first) throw InvalidArgument("custom family has no first derivative");
                          return c.first(x);
                        },
                    },
                    tag_);
}

double OperatorFamily::second(double x) const {
  return std::visit(overloaded{
                        [x](const PowerF& p) { return power(x, p.t - 2.0); },
                        [x](const NegLog&) { return 1.0 / (x * x); },
                        [x](const Entropy&) { return 1.0 / x; },
                        [x](const ExpH& h) { return std::exp(h.t * x); },
                        [](const HalfSquare&) { return 1.0; },
                        [x](const Custom& c) { return c.second(x); },
                    },
                    tag_);
}

bool OperatorFamily::has_first() const {
  if (const auto* c = std::get_if<Custom>(&tag_)) return static_cast<bool>(c->first);
  return true;
}

void OperatorFamily::check_domain(const LatticeElement& f) const {
  if (requires_positive()) {
    for (std::size_t i = 0; i < f.dim(); ++i)
      if (!(f[i] > kPositiveFloor)) throw NonPositiveInput(i, f[i]);
  }
  if (const auto* h = std::get_if<ExpH>(&tag_)) {
    for (std::size_t i = 0; i < f.dim(); ++i)
      if (h->t * f[i] > kExpArgumentCap)
        throw Overflow("ExpH argument t*f = " + detail::num(h->t * f[i]) + " exceeds " +
                       detail::num(kExpArgumentCap));
  }
}

LatticeElement OperatorFamily::eval(const LatticeElement& f) const {
  check_domain(f);
  return map_pointwise(f, [this](double x) { return value(x); });
}

LatticeElement OperatorFamily::derivative(const LatticeElement& f) const {
  check_domain(f);
  return map_pointwise(f, [this](double x) { return first(x); });
}

LatticeElement OperatorFamily::second_derivative(const LatticeElement& f) const {
  check_domain(f);
  return map_pointwise(f, [this](double x) { return second(x); });
}

LatticeElement log_series(const LatticeElement& f, const LogSeriesConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw InvalidArgument("log series tolerance must be positive");
  if (!(cfg.radius_margin > 0.0 && cfg.radius_margin < 1.0))
    throw InvalidArgument("log series radius margin must lie in (0, 1)");
  const std::size_t n = f.dim();
  std::vector<double> x(n);
  double radius = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = 1.0 - f[i];
    radius = std::max(radius, std::abs(x[i]));
  }
  const double limit = 1.0 - cfg.radius_margin;
  if (radius > limit) throw RadiusViolation(radius, limit);

  std::vector<double> sum(n, 0.0);
  std::vector<double> pw = x;
  for (std::size_t k = 1;; ++k) {
    if (k > cfg.max_terms)
      throw MaxTermsExceeded("log series did not reach tolerance in " + std::to_string(cfg.max_terms) +
                             " terms");
    double term_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double term = pw[i] / static_cast<double>(k);
      sum[i] -= term;
      term_norm = std::max(term_norm, std::abs(term));
    }
    if (term_norm < cfg.tol) break;
    for (std::size_t i = 0; i < n; ++i) pw[i] *= x[i];
  }
  return LatticeElement(std::move(sum));
}

double second_derivative_check(const OperatorFamily& fam, const LatticeElement& f,
                               const LatticeElement& h, double step) {
  if (!(step >= 1e-6)) throw InvalidArgument("finite-difference step below cancellation guard 1e-6");
  if (lattice_norm(h) == 0.0) throw InvalidArgument("direction must be nonzero");
  require_same_dim(f, h);
  const LatticeElement plus = fam.eval(f + step * h);
  const LatticeElement mid = fam.eval(f);
  const LatticeElement minus = fam.eval(f - step * h);
  const LatticeElement fd = (1.0 / (step * step)) * (plus - 2.0 * mid + minus);
  const LatticeElement analytic = multiply(fam.second_derivative(f), multiply(h, h));
  return lattice_norm(fd - analytic);
}

Ordering convexity_probe(const PointwiseMap& phi, const LatticeElement& f, const LatticeElement& g,
                         double lambda, const OrderTolerance& tol) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("convexity weight must lie in [0, 1]");
  require_same_dim(f, g);
  const LatticeElement lhs = phi(lambda * f + (1.0 - lambda) * g);
  const LatticeElement rhs = lambda * phi(f) + (1.0 - lambda) * phi(g);
  return partial_leq(lhs, rhs, tol);
}

Ordering convexity_probe(const OperatorFamily& fam, const LatticeElement& f, const LatticeElement& g,
                         double lambda, const OrderTolerance& tol) {
  return convexity_probe([&fam](const LatticeElement& x) { return fam.eval(x); }, f, g, lambda, tol);
}

void to_json(nlohmann::json& j, const OperatorFamily& fam) {
  std::visit(overloaded{
                 [&j](const PowerF& p) { j = {{"family", "PowerF"}, {"t", p.t}}; },
                 [&j](const NegLog&) { j = {{"family", "NegLog"}}; },
                 [&j](const Entropy&) { j = {{"family", "Entropy"}}; },
                 [&j](const ExpH& h) { j = {{"family", "ExpH"}, {"t", h.t}}; },
                 [&j](const HalfSquare&) { j = {{"family", "HalfSquare"}}; },
                 [&j](const Custom& c) { j = {{"family", "Custom"}, {"name", c.name}}; },
             },
             fam.tag());
}

OperatorFamily family_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw InvalidArgument("family selector must be an object with a 'family' string");
  const auto kind = j["family"].get<std::string>();
  auto param = [&j, &kind]() {
    if (!j.contains("t") || !j["t"].is_number())
      throw InvalidArgument("family " + kind + " requires numeric 't'");
    return j["t"].get<double>();
  };
  if (kind == "PowerF") return PowerF{param()};
  if (kind == "NegLog") return NegLog{};
  if (kind == "Entropy") return Entropy{};
  if (kind == "ExpH") return ExpH{param()};
  if (kind == "HalfSquare") return HalfSquare{};
  throw InvalidArgument("unknown or non-serializable family '" + kind + "'");
}

}  // namespace possemi
