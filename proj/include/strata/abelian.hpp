#pragma once

#include "strata/smith.hpp"

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace strata {

// Finitely generated abelian group presented by a relation matrix whose
// columns are relators on the listed generators. Groups are always
// carried as presentations so that homomorphisms stay composable; the
// invariant factors and free rank are cached from the Smith form of the
// relations. Over Q the presentation is a vector space and the torsion
// data is empty by construction.
template <class R>
class AbelianGroup {
 public:
  using Ring = R;
  using Scalar = typename R::Scalar;

  AbelianGroup() : gens_(0), relations_(0, 0) {}

  AbelianGroup(std::size_t gens, Matrix<R> relations)
      : gens_(gens), relations_(std::move(relations)) {
    if (relations_.rows() != gens_)
      throw std::invalid_argument("relation matrix must have one row per generator");
    auto s = smith_normal_form(relations_);
    rank_ = gens_ - s.rank;
    if (!R::is_field) {
      for (std::size_t i = 0; i < s.rank; ++i)
        if (s.D(i, i) != 1) invariant_factors_.push_back(s.D(i, i));
    }
  }

  static AbelianGroup free_group(std::size_t n) { return AbelianGroup(n, Matrix<R>(n, 0)); }
  static AbelianGroup trivial() { return free_group(0); }

  std::size_t gens() const { return gens_; }
  const Matrix<R>& relations() const { return relations_; }
  std::size_t rank() const { return rank_; }
  const std::vector<Scalar>& invariant_factors() const { return invariant_factors_; }

  bool is_trivial() const { return rank_ == 0 && invariant_factors_.empty(); }
  bool is_free() const { return invariant_factors_.empty(); }

  bool element_is_zero(const Matrix<R>& x) const {
    if (x.rows() != gens_ || x.cols() != 1)
      throw std::invalid_argument("element has wrong length");
    return in_column_span(relations_, x);
  }

  bool elements_equal(const Matrix<R>& x, const Matrix<R>& y) const {
    return element_is_zero(x - y);
  }

  // Structural (presentation-level) equality, used by round-trip checks.
  bool same_presentation(const AbelianGroup& o) const {
    return gens_ == o.gens_ && relations_ == o.relations_;
  }

  // Isomorphism-type equality.
  bool isomorphic_to(const AbelianGroup& o) const {
    return rank_ == o.rank_ && invariant_factors_ == o.invariant_factors_;
  }

  std::string to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (rank_ > 0) {
      os << R::name();
      if (rank_ > 1) os << "^" << rank_;
      first = false;
    }
    for (const auto& d : invariant_factors_) {
      if (!first) os << " + ";
      os << R::name() << "/" << scalar_to_string(d);
      first = false;
    }
    return os.str();
  }

 private:
  std::size_t gens_;
  Matrix<R> relations_;
  std::size_t rank_ = 0;
  std::vector<Scalar> invariant_factors_;
};

// Homomorphism between presented groups, given by a matrix on the chosen
// generators (column i is the image of source generator i). Whether the
// matrix actually descends to the quotients is checked, not assumed.
template <class R>
struct GroupHom {
  AbelianGroup<R> source;
  AbelianGroup<R> target;
  Matrix<R> matrix;

  GroupHom() = default;
  GroupHom(AbelianGroup<R> src, AbelianGroup<R> tgt, Matrix<R> m)
      : source(std::move(src)), target(std::move(tgt)), matrix(std::move(m)) {
    if (matrix.rows() != target.gens() || matrix.cols() != source.gens())
      throw std::invalid_argument("hom matrix shape does not match presentations");
  }

  static GroupHom zero(const AbelianGroup<R>& src, const AbelianGroup<R>& tgt) {
    return GroupHom(src, tgt, Matrix<R>(tgt.gens(), src.gens()));
  }
  static GroupHom identity(const AbelianGroup<R>& g) {
    return GroupHom(g, g, Matrix<R>::identity(g.gens()));
  }

  // Every relator of the source must land in the relation lattice of the
  // target.
  bool is_well_defined() const {
    const Matrix<R>& rel = source.relations();
    if (rel.cols() == 0) return true;
    return solve_matrix(target.relations(), matrix * rel).has_value();
  }

  bool is_zero_map() const {
    for (std::size_t j = 0; j < matrix.cols(); ++j)
      if (!target.element_is_zero(matrix.col(j))) return false;
    return true;
  }

  Matrix<R> apply(const Matrix<R>& x) const { return matrix * x; }

  bool equal_as_homs(const GroupHom& o) const {
    if (matrix.rows() != o.matrix.rows() || matrix.cols() != o.matrix.cols()) return false;
    Matrix<R> diff = matrix - o.matrix;
    for (std::size_t j = 0; j < diff.cols(); ++j)
      if (!target.element_is_zero(diff.col(j))) return false;
    return true;
  }
};

// f after g.
template <class R>
GroupHom<R> compose(const GroupHom<R>& f, const GroupHom<R>& g) {
  if (f.matrix.cols() != g.matrix.rows())
    throw std::invalid_argument("compose: inner dimensions disagree");
  return GroupHom<R>(g.source, f.target, f.matrix * g.matrix);
}

template <class R>
GroupHom<R> hom_sum(const GroupHom<R>& f, const GroupHom<R>& g) {
  return GroupHom<R>(f.source, f.target, f.matrix + g.matrix);
}

// Kernel, image and cokernel of a hom, each with the witnessing map.
// kernel_incl : kernel -> source, image_incl : image -> target,
// cokernel_proj : target -> cokernel.
template <class R>
struct Subquotients {
  AbelianGroup<R> kernel;
  GroupHom<R> kernel_incl;
  AbelianGroup<R> image;
  GroupHom<R> image_incl;
  AbelianGroup<R> cokernel;
  GroupHom<R> cokernel_proj;
};

template <class R>
Subquotients<R> hom_subquotients(const GroupHom<R>& f) {
  if (!f.is_well_defined())
    throw std::invalid_argument("hom is not well defined on the given presentations");
  Subquotients<R> out;

  // K' = {x in the free cover of the source : f(x) lies in the relation
  // lattice of the target}. Then ker f = K'/R_src and im f = F_src/K'.
  Matrix<R> Kp = preimage_basis(f.matrix, f.target.relations());

  // Relators of the source expressed in the K' basis (solvable by
  // well-definedness, unique because Kp has independent columns).
  Matrix<R> kernel_rels(Kp.cols(), 0);
  if (f.source.relations().cols() > 0) {
    auto expr = solve_matrix(Kp, f.source.relations());
    if (!expr) throw std::logic_error("source relators escaped the kernel lattice");
    kernel_rels = *expr;
  }
  out.kernel = AbelianGroup<R>(Kp.cols(), kernel_rels);
  out.kernel_incl = GroupHom<R>(out.kernel, f.source, Kp);

  out.image = AbelianGroup<R>(f.source.gens(), Kp);
  out.image_incl = GroupHom<R>(out.image, f.target, f.matrix);

  out.cokernel =
      AbelianGroup<R>(f.target.gens(), Matrix<R>::hstack(f.target.relations(), f.matrix));
  out.cokernel_proj =
      GroupHom<R>(f.target, out.cokernel, Matrix<R>::identity(f.target.gens()));
  return out;
}

// Quotient of the target of an inclusion-like hom by its image.
template <class R>
AbelianGroup<R> quotient_by_image(const GroupHom<R>& incl) {
  return AbelianGroup<R>(incl.target.gens(),
                         Matrix<R>::hstack(incl.target.relations(), incl.matrix));
}

template <class R>
struct DirectSum {
  AbelianGroup<R> group;
  GroupHom<R> inj_left, inj_right;
  GroupHom<R> proj_left, proj_right;
};

template <class R>
DirectSum<R> direct_sum(const AbelianGroup<R>& a, const AbelianGroup<R>& b) {
  DirectSum<R> out;
  out.group = AbelianGroup<R>(a.gens() + b.gens(),
                              Matrix<R>::block_diag(a.relations(), b.relations()));
  Matrix<R> ia(a.gens() + b.gens(), a.gens());
  Matrix<R> ib(a.gens() + b.gens(), b.gens());
  for (std::size_t i = 0; i < a.gens(); ++i) ia(i, i) = 1;
  for (std::size_t i = 0; i < b.gens(); ++i) ib(a.gens() + i, i) = 1;
  out.inj_left = GroupHom<R>(a, out.group, ia);
  out.inj_right = GroupHom<R>(b, out.group, ib);
  out.proj_left = GroupHom<R>(out.group, a, ia.transposed());
  out.proj_right = GroupHom<R>(out.group, b, ib.transposed());
  return out;
}

// Nondegeneracy verdict for a bilinear pairing over a field, with the
// radical bases as witnesses in the degenerate case. P has one row per
// generator of `left` and one column per generator of `right`.
struct PairingVerdict {
  bool nondegenerate = false;
  QMatrix left_radical;   // columns: left vectors pairing to zero with everything
  QMatrix right_radical;  // columns: right vectors in the radical
};

inline PairingVerdict pairing_check(const QMatrix& P, const AbelianGroup<QRing>& left,
                                    const AbelianGroup<QRing>& right) {
  if (P.rows() != left.gens() || P.cols() != right.gens())
    throw std::invalid_argument("pairing matrix shape does not match the groups");
  PairingVerdict v;
  std::size_t r = matrix_rank(P);
  v.nondegenerate = (r == left.rank() && r == right.rank() && left.rank() == right.rank() &&
                     r == P.rows() && r == P.cols());
  if (!v.nondegenerate) {
    v.right_radical = kernel_basis(P);
    v.left_radical = kernel_basis(P.transposed());
  }
  return v;
}

}  // namespace strata
