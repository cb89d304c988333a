#pragma once

// Seeded random instances for suites and property tests.

#include <cstddef>
#include <random>

#include "possemi/jessen.hpp"
#include "possemi/lattice.hpp"
#include "possemi/operator_functions.hpp"
#include "possemi/semigroup.hpp"

namespace possemi {

using Rng = std::mt19937_64;

enum class RowSums { Zero, NonPositive, Positive };

/// Metzler matrix with |Q|_inf <= max_norm. Off-diagonal entries are zero
/// with probability 0.3; the diagonal fixes the row-sum class.
Generator random_generator(Rng& rng, std::size_t n, double max_norm, RowSums kind = RowSums::Zero);

LatticeElement random_element(Rng& rng, std::size_t n, double lo, double hi);

/// A point inside the family's domain: [0.2, 3] for families needing
/// positive input, [-2, 2] otherwise.
LatticeElement random_in_domain(Rng& rng, const OperatorFamily& fam, std::size_t n);

/// Entries uniform in [0, 1] with at least one strictly positive entry.
DualVector random_positive_dual(Rng& rng, std::size_t n);

}  // namespace possemi
