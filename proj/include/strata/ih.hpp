#pragma once

#include "strata/tower.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace strata {

namespace detail {

// Deterministic extension of the columns of B to a basis of the ambient
// space by standard basis vectors (lowest index first).
inline QMatrix complement_by_standard_vectors(const QMatrix& B, std::size_t dim) {
  QMatrix current = B;
  QMatrix out(dim, 0);
  std::size_t rank = matrix_rank(current);
  for (std::size_t i = 0; i < dim && rank < dim; ++i) {
    QMatrix e = QMatrix::basis_column(dim, i);
    QMatrix trym = QMatrix::hstack(current, e);
    if (matrix_rank(trym) > rank) {
      current = trym;
      out = QMatrix::hstack(out, e);
      ++rank;
    }
  }
  return out;
}

// Rows of [B | C]^{-1} belonging to the C block: the coordinate map of
// the projection onto span(C) along span(B).
inline QMatrix projection_coords(const QMatrix& B, const QMatrix& C) {
  QMatrix full = QMatrix::hstack(B, C);
  auto inv = solve_matrix(full, QMatrix::identity(full.rows()));
  if (!inv) throw std::logic_error("projection basis is singular");
  return inv->block(B.cols(), 0, C.cols(), full.rows());
}

}  // namespace detail

// One closed-form level of the intersection-homology tower, l steps above
// the slice. The middle groups are carried on recorded bases: the
// relative one on the cosets stab^l(beta_t) of a deterministic complement
// of ker(var), the absolute one on infinity^l(beta_t), i.e. the classes
// var(beta_t) spanning the image. All other degrees are either zero, the
// kernel/cokernel of the slice variation, or the slice groups carried by
// reference.
struct IhTowerLevel {
  int l = 0;
  int m = 0, d = 0, k = 0;
  IhSliceData slice;

  QMatrix kernel_vectors;  // basis of ker(var) in slice rel coords
  QMatrix coset_reps;      // complement basis beta_t in slice rel coords
  QMatrix image_vectors;   // var(beta_t) in slice abs coords
  QMatrix coker_reps;      // complement of the image in slice abs coords

  AbelianGroup<QRing> rel_mid;  // degree d + l
  AbelianGroup<QRing> abs_mid;  // degree d + l
  AbelianGroup<QRing> abs_coker;  // degree d
  AbelianGroup<QRing> rel_kernel;  // degree d + 2l

  GroupHom<QRing> stab_op;      // slice rel_d -> rel_mid, alpha -> coset coords
  GroupHom<QRing> infinity_op;  // slice rel_d -> abs_mid, alpha -> coords of var(alpha)
  GroupHom<QRing> coker_proj;   // slice abs_d -> abs_coker
  GroupHom<QRing> var_mid;      // rel_mid -> abs_mid
  GroupHom<QRing> jmap_mid;     // abs_mid -> rel_mid

  QMatrix pairing_mid;        // rel_mid x abs_mid, built by the step-sign recursion
  QMatrix pairing_ker_coker;  // rel_kernel x abs_coker, slice pairing on representatives

  int middle_degree() const { return d + l; }

  AbelianGroup<QRing> abs_group(int i) const {
    if (i <= d - 1) return slice.abs_at(i);
    if (i == d) return abs_coker;
    if (i == d + l) return abs_mid;
    return AbelianGroup<QRing>::trivial();
  }
  AbelianGroup<QRing> rel_group(int j) const {
    if (j == d + l) return rel_mid;
    if (j == d + 2 * l) return rel_kernel;
    if (j >= d + 2 * l + 1) return slice.rel_at(j - 2 * l);
    return AbelianGroup<QRing>::trivial();
  }

  // Pairing of the level between rel degree 2(d+l)-i and abs degree i.
  // Degrees below the middle of the slice are carried by reference, so
  // the slice pairing is returned verbatim there.
  std::optional<QMatrix> pairing_at(int i) const {
    if (i < d) {
      auto it = slice.pairing.find(i);
      if (it == slice.pairing.end()) return std::nullopt;
      return it->second;
    }
    if (i == d) return pairing_ker_coker;
    if (i == d + l) return pairing_mid;
    return std::nullopt;
  }
};

// Sign of the one-step pairing transport leaving level m+a-1.
inline int ih_step_sign(int d, int a) { return (d + a - 1) % 2 == 0 ? 1 : -1; }

// Closed-form sign of the l-step transport.
inline int ih_pairing_sign(int d, int l) {
  long long e = static_cast<long long>(l) * d + static_cast<long long>(l) * (l - 1) / 2;
  return e % 2 == 0 ? 1 : -1;
}

inline IhTowerLevel ih_stabilize(const IhSliceData& slice, int l) {
  if (l < 1 || l > slice.k)
    throw std::invalid_argument("step count must satisfy 1 <= l <= k");
  auto verdict = validate_slice(slice);
  if (!verdict.ok())
    throw std::invalid_argument("slice fails validation: " + verdict.violations.front().rule);

  IhTowerLevel lvl;
  lvl.l = l;
  lvl.m = slice.m;
  lvl.d = slice.d;
  lvl.k = slice.k;
  lvl.slice = slice;

  const QMatrix& var = slice.var.matrix;
  const std::size_t grel = slice.rel_at(slice.d).gens();
  const std::size_t gabs = slice.abs_at(slice.d).gens();

  lvl.kernel_vectors = kernel_basis(var);
  lvl.coset_reps = detail::complement_by_standard_vectors(lvl.kernel_vectors, grel);
  lvl.image_vectors = var * lvl.coset_reps;
  lvl.coker_reps = detail::complement_by_standard_vectors(lvl.image_vectors, gabs);

  const std::size_t c = lvl.coset_reps.cols();
  lvl.rel_mid = AbelianGroup<QRing>::free_group(c);
  lvl.abs_mid = AbelianGroup<QRing>::free_group(c);
  lvl.abs_coker = AbelianGroup<QRing>::free_group(lvl.coker_reps.cols());
  lvl.rel_kernel = AbelianGroup<QRing>::free_group(lvl.kernel_vectors.cols());

  lvl.stab_op = GroupHom<QRing>(slice.rel_at(slice.d), lvl.rel_mid,
                                grel ? detail::projection_coords(lvl.kernel_vectors,
                                                                 lvl.coset_reps)
                                     : QMatrix(0, 0));
  // Coordinates of var(alpha) in the image basis, solved rather than
  // projected so the two routes stay independent.
  auto inf_matrix = solve_matrix(lvl.image_vectors, var);
  if (!inf_matrix) throw std::logic_error("variation image escaped its own span");
  lvl.infinity_op = GroupHom<QRing>(slice.rel_at(slice.d), lvl.abs_mid, *inf_matrix);

  lvl.coker_proj = GroupHom<QRing>(
      slice.abs_at(slice.d), lvl.abs_coker,
      gabs ? detail::projection_coords(lvl.image_vectors, lvl.coker_reps) : QMatrix(0, 0));

  // var on the middle degree maps stab^l(beta_t) to infinity^l(beta_t).
  lvl.var_mid = GroupHom<QRing>(lvl.rel_mid, lvl.abs_mid,
                                lvl.infinity_op.matrix * lvl.coset_reps);

  // jmap on the middle degree: infinity^l(a) goes to
  // -stab^l(2a + jmap(var(a))) for odd l and stab^l(jmap(var(a))) for
  // even l.
  {
    QMatrix jv = slice.jmap.matrix * var;  // rel_d -> rel_d
    QMatrix arg = (l % 2 == 1)
                      ? QMatrix(lvl.coset_reps * Rat(2) + jv * lvl.coset_reps)
                      : QMatrix(jv * lvl.coset_reps);
    QMatrix jm = lvl.stab_op.matrix * arg;
    if (l % 2 == 1) jm = -jm;
    lvl.jmap_mid = GroupHom<QRing>(lvl.abs_mid, lvl.rel_mid, jm);
  }

  // Pairing transport, one step at a time.
  {
    auto pit = slice.pairing.find(slice.d);
    QMatrix base = pit != slice.pairing.end() ? pit->second : QMatrix(grel, gabs);
    QMatrix P = lvl.coset_reps.transposed() * base * lvl.image_vectors;
    for (int a = 1; a <= l; ++a) P = P * Rat(ih_step_sign(slice.d, a));
    lvl.pairing_mid = P;

    lvl.pairing_ker_coker =
        lvl.kernel_vectors.transposed() * base * lvl.coker_reps;
  }
  return lvl;
}

inline std::vector<IhTowerLevel> ih_tower(const IhSliceData& slice, int steps) {
  std::vector<IhTowerLevel> out;
  for (int l = 1; l <= steps; ++l) out.push_back(ih_stabilize(slice, l));
  return out;
}

// The middle-degree operators of a level, under the recorded bases.
inline const GroupHom<QRing>& ih_variation(const IhTowerLevel& lvl) { return lvl.var_mid; }
inline const GroupHom<QRing>& ih_relativization(const IhTowerLevel& lvl) {
  return lvl.jmap_mid;
}

// Pairing values by the closed transport formula; degree arguments follow
// the level profile.
inline Rat ih_pairing(const IhTowerLevel& lvl, const QMatrix& alpha, const QMatrix& beta) {
  // alpha, beta are slice rel_d vectors; value of <stab^l a, inf^l b>.
  auto pit = lvl.slice.pairing.find(lvl.d);
  if (pit == lvl.slice.pairing.end())
    throw std::invalid_argument("slice pairing missing in the middle degree");
  QMatrix v = alpha.transposed() * pit->second * (lvl.slice.var.matrix * beta);
  return v(0, 0) * Rat(ih_pairing_sign(lvl.d, lvl.l));
}

struct OrthogonalityVerdict {
  bool orthogonal = true;
  // Witness pair when it fails: kernel vector index and generator index.
  std::size_t kernel_index = 0, generator_index = 0;
  Rat value;
};

// <ker(var), im(var)> must vanish for geometrically realizable slices.
inline OrthogonalityVerdict orthogonality_check(const IhSliceData& slice) {
  OrthogonalityVerdict v;
  auto pit = slice.pairing.find(slice.d);
  if (pit == slice.pairing.end()) return v;
  QMatrix K = kernel_basis(slice.var.matrix);
  QMatrix O = K.transposed() * pit->second * slice.var.matrix;
  for (std::size_t i = 0; i < O.rows(); ++i)
    for (std::size_t j = 0; j < O.cols(); ++j)
      if (O(i, j) != 0) {
        v.orthogonal = false;
        v.kernel_index = i;
        v.generator_index = j;
        v.value = O(i, j);
        return v;
      }
  return v;
}

// Compatibility of the comparison maps rho (absolute) and rho_bar
// (relative) between the intersection-homology tower and the ordinary
// one, both over Q. The maps at higher levels are induced from the slice
// maps through the recorded identifications; what is genuinely at stake
// is the slice-level intertwining and the well-definedness of the lifts.
struct RhoLine {
  std::string identity;
  int level = 0;  // steps above the slice
  bool pass = false;
  int failing_basis = -1;
};

struct RhoReport {
  bool applicable = true;
  std::string reason;
  std::vector<RhoLine> lines;
  bool all_pass() const {
    for (const auto& l : lines)
      if (!l.pass) return false;
    return applicable;
  }
};

inline int first_nonzero_column(const QMatrix& m) {
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0) return static_cast<int>(j);
  return -1;
}

inline RhoReport rho_compatibility(const Tower<QRing>& ordinary,
                                   const std::vector<IhTowerLevel>& ih,
                                   const GroupHom<QRing>& rho,
                                   const GroupHom<QRing>& rho_bar) {
  RhoReport rep;
  if (ih.empty()) {
    rep.applicable = false;
    rep.reason = "no computed levels";
    return rep;
  }
  const IhSliceData& slice = ih.front().slice;
  const int m = ordinary.base.m, d = slice.d;
  if (ordinary.base.d != d || ordinary.base.m != slice.m) {
    rep.applicable = false;
    rep.reason = "ordinary and intersection slices disagree on (m, d)";
    return rep;
  }
  const QMatrix& var_ih = slice.var.matrix;
  QMatrix var_ord = ordinary.level(m).var_at(d).matrix;

  auto push = [&rep](std::string id, int level, const QMatrix& diff) {
    RhoLine line;
    line.identity = std::move(id);
    line.level = level;
    int bad = first_nonzero_column(diff);
    line.pass = bad < 0;
    line.failing_basis = bad;
    rep.lines.push_back(line);
  };

  // Slice-level intertwining: var o rho_bar = rho o var.
  push("var.rho_bar == rho.var", 0,
       var_ord * rho_bar.matrix - rho.matrix * var_ih);

  int max_l = static_cast<int>(ih.size());
  std::vector<QMatrix> rbar(static_cast<std::size_t>(max_l) + 1);
  std::vector<QMatrix> rabs(static_cast<std::size_t>(max_l) + 1);
  rbar[0] = rho_bar.matrix;
  rabs[0] = rho.matrix;
  for (int l = 1; l <= max_l; ++l) {
    const IhTowerLevel& lvl = ih[static_cast<std::size_t>(l - 1)];
    QMatrix stab_pow = ordinary.stab_power(m, m + l, d).matrix;
    rbar[static_cast<std::size_t>(l)] = stab_pow * rho_bar.matrix * lvl.coset_reps;
    rabs[static_cast<std::size_t>(l)] = var_ord * rho_bar.matrix * lvl.coset_reps;

    // Lifts must kill ker(var): otherwise the induced maps are not maps.
    push("rho_bar lift well-defined", l, stab_pow * rho_bar.matrix * lvl.kernel_vectors);
    push("rho lift well-defined", l, var_ord * rho_bar.matrix * lvl.kernel_vectors);

    // Identity 1 at level m+l.
    QMatrix var_ord_level = ordinary.level(m + l).var_at(d + l).matrix;
    push("var.rho_bar == rho.var", l,
         var_ord_level * rbar[static_cast<std::size_t>(l)] -
             rabs[static_cast<std::size_t>(l)] * lvl.var_mid.matrix);

    // Identity 2 from the slice: rho_bar . stab^l == stab^l . rho_bar.
    push("rho_bar.stab == stab.rho_bar", l,
         rbar[static_cast<std::size_t>(l)] * lvl.stab_op.matrix -
             stab_pow * rho_bar.matrix);

    // Identity 3 from the slice: rho . infinity^l == sigma^l.var.rho_bar.
    push("rho.infinity == sigma.var.rho_bar", l,
         rabs[static_cast<std::size_t>(l)] * lvl.infinity_op.matrix -
             var_ord * rho_bar.matrix);

    // Step-wise forms between consecutive levels.
    if (l >= 2) {
      QMatrix stab_step = ordinary.stab_hom(m + l - 1, d + l - 1).matrix;
      push("rho_bar.stab == stab.rho_bar (step)", l,
           rbar[static_cast<std::size_t>(l)] -
               stab_step * rbar[static_cast<std::size_t>(l - 1)]);
      QMatrix var_prev = ordinary.level(m + l - 1).var_at(d + l - 1).matrix;
      push("rho.infinity == sigma.var.rho_bar (step)", l,
           rabs[static_cast<std::size_t>(l)] -
               var_prev * rbar[static_cast<std::size_t>(l - 1)]);
    }
  }
  return rep;
}

}  // namespace strata
