#include "possemi/sampling.hpp"

#include <algorithm>

#include "possemi/errors.hpp"

namespace possemi {

Generator random_generator(Rng& rng, std::size_t n, double max_norm, RowSums kind) {
  if (n == 0) throw InvalidArgument("generator dimension must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix q = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      if (i != j && unit(rng) < 0.7) q(i, j) = unit(rng);

  // Rows hold off-diagonal mass r_i; the diagonal is -r_i plus a shift of
  // at most r_i/2, so |Q|_inf <= 2.5 max r_i before rescaling.
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double r = q.row(i).sum();
    double shift = 0.0;
    if (kind == RowSums::NonPositive) shift = -0.5 * r * unit(rng);
    if (kind == RowSums::Positive) shift = 0.5 * r * (0.2 + 0.8 * unit(rng));
    q(i, i) = -r + shift;
  }
  if (kind == RowSums::Positive && q.rowwise().sum().maxCoeff() <= 0.0 && n > 1) {
    q(0, 1) += 0.5;  // all rows were empty: force one positive row sum
  } else if (kind == RowSums::Positive && n == 1) {
    q(0, 0) = 1.0;
  }
  const double norm = q.cwiseAbs().rowwise().sum().maxCoeff();
  if (norm > 0.0) q *= max_norm * (0.1 + 0.9 * unit(rng)) / norm;
  if (kind == RowSums::Zero) {
    // Recompute the diagonal after scaling so row sums are zero to roundoff.
    for (Eigen::Index i = 0; i < dim; ++i) {
      double r = 0.0;
      for (Eigen::Index j = 0; j < dim; ++j)
        if (j != i) r += q(i, j);
      q(i, i) = -r;
    }
  }
  return Generator::validate(q, "random");
}

LatticeElement random_element(Rng& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return LatticeElement(std::move(v));
}

LatticeElement random_in_domain(Rng& rng, const OperatorFamily& fam, std::size_t n) {
  return fam.requires_positive() ? random_element(rng, n, 0.2, 3.0) : random_element(rng, n, -2.0, 2.0);
}

DualVector random_positive_dual(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = unit(rng);
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
  return DualVector(std::move(v));
}

}  // namespace possemi
