#pragma once

// Randomized intersection-homology slices consistent with the standing
// duality hypotheses: a nondegenerate pairing, a variation of prescribed
// rank whose kernel is orthogonal to its image, and an arbitrary
// relativization. Construction: pick the kernel first, then force the
// image onto the pairing-orthogonal complement of the kernel.

#include "strata/slice.hpp"
#include "strata/smith.hpp"

#include <random>

namespace ih_random {

using namespace strata;

inline QMatrix random_invertible(std::mt19937& rng, std::size_t g) {
  std::uniform_int_distribution<long long> val(-3, 3);
  for (;;) {
    QMatrix m(g, g);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j) m(i, j) = Rat(val(rng));
    if (matrix_rank(m) == g) return m;
  }
}

inline QMatrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols) {
  std::uniform_int_distribution<long long> val(-3, 3);
  QMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = Rat(val(rng));
  return m;
}

struct RandomIhSpec {
  std::size_t g = 2;       // dim of the middle groups
  std::size_t rank = 1;    // rank of the variation
  int d = 1;               // middle degree
  int k = 4;               // supported stabilization steps
  bool lower_degrees = false;
};

inline IhSliceData make_random_ih_slice(std::mt19937& rng, const RandomIhSpec& spec) {
  IhSliceData s;
  s.m = 2;
  s.k = spec.k;
  s.n = s.m + s.k;
  s.d = spec.d;

  const std::size_t g = spec.g, r = spec.rank;
  auto grp = AbelianGroup<QRing>::free_group(g);
  s.rel[s.d] = grp;
  s.abs[s.d] = grp;

  QMatrix P = random_invertible(rng, g);
  s.pairing[s.d] = P;

  QMatrix T = random_invertible(rng, g);
  QMatrix K = T.block(0, 0, g, g - r);           // kernel of the variation
  QMatrix C = T.block(0, g - r, g, r);           // complement
  QMatrix image_space = kernel_basis(QMatrix(K.transposed() * P));  // g x r

  // var: K -> 0, C -> image basis mixed by a random invertible factor.
  QMatrix S = random_invertible(rng, r);
  QMatrix images = QMatrix::hstack(QMatrix(g, g - r), QMatrix(image_space * S));
  auto Tinv = solve_matrix(T, QMatrix::identity(g));
  QMatrix var = images * *Tinv;
  s.var = GroupHom<QRing>(grp, grp, var);
  s.jmap = GroupHom<QRing>(grp, grp, random_matrix(rng, g, g));

  if (spec.lower_degrees && s.d >= 1) {
    std::uniform_int_distribution<std::size_t> dim(1, 3);
    for (int i = 0; i < s.d; ++i) {
      std::size_t e = dim(rng);
      s.abs[i] = AbelianGroup<QRing>::free_group(e);
      s.rel[2 * s.d - i] = AbelianGroup<QRing>::free_group(e);
      s.pairing[i] = random_invertible(rng, e);
    }
  }
  return s;
}

}  // namespace ih_random
