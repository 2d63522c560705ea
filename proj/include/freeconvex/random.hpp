#pragma once

#include <random>

#include "freeconvex/matcore.hpp"

namespace freeconvex {

using Rng = std::mt19937_64;

ComplexMatrix random_gaussian(Index rows, Index cols, Rng& rng);
ComplexVector random_unit_vector(Index n, Rng& rng);
/// Hermitian with i.i.d. Gaussian entries (GUE-like, unnormalized).
HermitianMatrix random_hermitian(Index n, Rng& rng);
/// G G^dagger / tr for Gaussian n x rank G.
HermitianMatrix random_density(Index n, Rng& rng, Index rank = -1);
/// Haar-distributed unitary (QR of a Gaussian matrix with phase fix).
ComplexMatrix random_unitary(Index n, Rng& rng);

}  // namespace freeconvex
