#pragma once

#include "strata/abelian.hpp"

#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace strata {

// Transversal-slice input for the stabilization towers. Graded groups are
// stored sparsely: an absent degree means the zero group. `rel` holds the
// relative groups (cycles mod the boundary sphere), `abs` the absolute
// ones; `var` and `jmap` are the degree-preserving variation and
// relativization operators between them.
template <class R>
struct SliceData {
  int n = 0;  // ambient dimension the slice was built in
  int k = 0;  // stratum dimension
  int m = 0;  // slice dimension, n - k
  int d = 0;  // complex dimension of the slice fiber

  std::map<int, AbelianGroup<R>> rel;
  std::map<int, AbelianGroup<R>> abs;
  std::map<int, GroupHom<R>> var;   // rel[j] -> abs[j]
  std::map<int, GroupHom<R>> jmap;  // abs[j] -> rel[j]

  AbelianGroup<R> rel_at(int j) const { return group_at(rel, j); }
  AbelianGroup<R> abs_at(int j) const { return group_at(abs, j); }

  GroupHom<R> var_at(int j) const {
    auto it = var.find(j);
    if (it != var.end()) return it->second;
    return GroupHom<R>::zero(rel_at(j), abs_at(j));
  }
  GroupHom<R> jmap_at(int j) const {
    auto it = jmap.find(j);
    if (it != jmap.end()) return it->second;
    return GroupHom<R>::zero(abs_at(j), rel_at(j));
  }

  bool same_presentation(const SliceData& o) const {
    if (n != o.n || k != o.k || m != o.m || d != o.d) return false;
    auto groups_eq = [](const std::map<int, AbelianGroup<R>>& a,
                        const std::map<int, AbelianGroup<R>>& b) {
      if (a.size() != b.size()) return false;
      for (const auto& [deg, g] : a) {
        auto it = b.find(deg);
        if (it == b.end() || !g.same_presentation(it->second)) return false;
      }
      return true;
    };
    auto homs_eq = [](const std::map<int, GroupHom<R>>& a,
                      const std::map<int, GroupHom<R>>& b) {
      if (a.size() != b.size()) return false;
      for (const auto& [deg, h] : a) {
        auto it = b.find(deg);
        if (it == b.end() || h.matrix != it->second.matrix) return false;
      }
      return true;
    };
    return groups_eq(rel, o.rel) && groups_eq(abs, o.abs) && homs_eq(var, o.var) &&
           homs_eq(jmap, o.jmap);
  }

 private:
  static AbelianGroup<R> group_at(const std::map<int, AbelianGroup<R>>& m_, int j) {
    auto it = m_.find(j);
    return it == m_.end() ? AbelianGroup<R>::trivial() : it->second;
  }
};

// Field-coefficient intersection-homology slice. Groups below the middle
// degree live on the absolute side, groups above it on the relative side;
// var and jmap act in the middle degree d only. `pairing[i]` is the
// intersection pairing between rel degree 2d-i and abs degree i
// (one row per rel generator, one column per abs generator).
struct IhSliceData {
  int n = 0;
  int k = 0;
  int m = 0;
  int d = 0;

  std::map<int, AbelianGroup<QRing>> rel;
  std::map<int, AbelianGroup<QRing>> abs;
  GroupHom<QRing> var;   // rel[d] -> abs[d]
  GroupHom<QRing> jmap;  // abs[d] -> rel[d]
  std::map<int, QMatrix> pairing;

  AbelianGroup<QRing> rel_at(int j) const {
    auto it = rel.find(j);
    return it == rel.end() ? AbelianGroup<QRing>::trivial() : it->second;
  }
  AbelianGroup<QRing> abs_at(int j) const {
    auto it = abs.find(j);
    return it == abs.end() ? AbelianGroup<QRing>::trivial() : it->second;
  }
};

// Branch multiplicities of a plane-curve germ; the slice fiber is a
// cluster of u = sum(mults) points permuted cyclically branch by branch.
struct CurveGermSpec {
  std::vector<int> mults;

  int total() const { return std::accumulate(mults.begin(), mults.end(), 0); }
  int branches() const { return static_cast<int>(mults.size()); }
};

namespace detail {

// Index of the point the monodromy sends point t to (points are numbered
// branch by branch, within a branch in transport order).
inline int germ_monodromy_image(const CurveGermSpec& spec, int t) {
  int base = 0;
  for (int u : spec.mults) {
    if (t < base + u) return base + (t - base + 1) % u;
    base += u;
  }
  throw std::logic_error("point index out of range");
}

}  // namespace detail

// Slice of a plane-curve germ: u points in degree 0. The absolute group
// is the reduced homology of the points with basis {p_t - p_1, t >= 2};
// the relative group is spanned by the point classes modulo the
// fundamental class, which eliminates the last generator.
template <class R>
SliceData<R> curve_germ_slice(const CurveGermSpec& spec) {
  if (spec.mults.empty()) throw std::invalid_argument("empty multiplicity list");
  for (int u : spec.mults)
    if (u < 1) throw std::invalid_argument("branch multiplicities must be positive");
  const int u = spec.total();

  SliceData<R> s;
  s.n = 2;
  s.k = 0;
  s.m = 2;
  s.d = 0;

  AbelianGroup<R> rel0 = AbelianGroup<R>::free_group(u - 1);
  AbelianGroup<R> abs0 = AbelianGroup<R>::free_group(u - 1);
  if (u == 1) {
    s.rel[0] = rel0;
    s.abs[0] = abs0;
    s.var[0] = GroupHom<R>::zero(rel0, abs0);
    s.jmap[0] = GroupHom<R>::zero(abs0, rel0);
    return s;
  }

  // Point class t (0-based) in the relative basis p_0..p_{u-2};
  // p_{u-1} = -(p_0 + ... + p_{u-2}).
  auto rel_coords = [&](int t) {
    Matrix<R> v(static_cast<std::size_t>(u - 1), 1);
    if (t < u - 1) {
      v(t, 0) = 1;
    } else {
      for (int i = 0; i < u - 1; ++i) v(i, 0) = -1;
    }
    return v;
  };
  // Difference class p_a - p_b in the absolute basis e_t = p_t - p_0.
  auto abs_diff = [&](int a, int b) {
    Matrix<R> v(static_cast<std::size_t>(u - 1), 1);
    if (a > 0) v(a - 1, 0) += 1;
    if (b > 0) v(b - 1, 0) -= 1;
    return v;
  };

  Matrix<R> var_m(static_cast<std::size_t>(u - 1), static_cast<std::size_t>(u - 1));
  for (int t = 0; t < u - 1; ++t)
    var_m.set_col(t, abs_diff(detail::germ_monodromy_image(spec, t), t));

  Matrix<R> jmap_m(static_cast<std::size_t>(u - 1), static_cast<std::size_t>(u - 1));
  for (int t = 1; t < u; ++t)
    jmap_m.set_col(t - 1, rel_coords(t) - rel_coords(0));

  s.rel[0] = rel0;
  s.abs[0] = abs0;
  s.var[0] = GroupHom<R>(rel0, abs0, var_m);
  s.jmap[0] = GroupHom<R>(abs0, rel0, jmap_m);
  return s;
}

// Slice of a transverse Morse point on an m-dimensional slice: a single
// vanishing cycle in degree d = m - 2. For even m the variation is
// trivial and the relativization is multiplication by -2 (the two-point
// convention); for odd m the variation is multiplication by 2 and the
// relativization vanishes.
template <class R>
SliceData<R> transverse_morse_slice(int m) {
  if (m < 2) throw std::invalid_argument("transverse Morse slice needs m >= 2");
  SliceData<R> s;
  s.n = m;
  s.k = 0;
  s.m = m;
  s.d = m - 2;

  AbelianGroup<R> g = AbelianGroup<R>::free_group(1);
  Matrix<R> two(1, 1);
  two(0, 0) = 2;
  s.rel[s.d] = g;
  s.abs[s.d] = g;
  if (m % 2 == 0) {
    s.var[s.d] = GroupHom<R>::zero(g, g);
    s.jmap[s.d] = GroupHom<R>(g, g, -two);
  } else {
    s.var[s.d] = GroupHom<R>(g, g, two);
    s.jmap[s.d] = GroupHom<R>::zero(g, g);
  }
  return s;
}

// Two points swapped by the monodromy: the seed of the smooth-hypersurface
// tower. Same homology data as the multiplicity-2 germ, relabeled to
// slice dimension 1.
template <class R>
SliceData<R> smooth_pl_base_slice() {
  SliceData<R> s = curve_germ_slice<R>(CurveGermSpec{{2}});
  s.n = 2;
  s.k = 1;
  s.m = 1;
  return s;
}

// Intersection-homology versions of the built-in slices. The slice
// fibers involved are smooth (a point cluster or a Morse level set), so
// the groups coincide with the ordinary ones over Q; the pairing is the
// duality pairing between relative and absolute classes. `ambient` fixes
// how many stabilization steps the slice supports (k = ambient - m).
inline IhSliceData ih_curve_germ_slice(const CurveGermSpec& spec, int ambient) {
  auto ord = curve_germ_slice<QRing>(spec);
  if (ambient < ord.m) throw std::invalid_argument("ambient dimension below the slice level");
  IhSliceData s;
  s.n = ambient;
  s.m = ord.m;
  s.k = ambient - ord.m;
  s.d = 0;
  s.rel[0] = ord.rel.at(0);
  s.abs[0] = ord.abs.at(0);
  s.var = ord.var.at(0);
  s.jmap = ord.jmap.at(0);
  const int u = spec.total();
  if (u > 1) {
    // <p_i, p_t - p_0> = delta_{it} - delta_{i0} on the point classes.
    QMatrix P(static_cast<std::size_t>(u - 1), static_cast<std::size_t>(u - 1));
    for (int i = 0; i < u - 1; ++i)
      for (int t = 1; t < u; ++t) P(i, t - 1) = Rat((i == t ? 1 : 0) - (i == 0 ? 1 : 0));
    s.pairing[0] = P;
  } else {
    s.pairing[0] = QMatrix(0, 0);
  }
  return s;
}

inline IhSliceData ih_transverse_morse_slice(int m, int ambient) {
  auto ord = transverse_morse_slice<QRing>(m);
  if (ambient < m) throw std::invalid_argument("ambient dimension below the slice level");
  IhSliceData s;
  s.n = ambient;
  s.m = m;
  s.k = ambient - m;
  s.d = ord.d;
  s.rel[s.d] = ord.rel.at(s.d);
  s.abs[s.d] = ord.abs.at(s.d);
  s.var = ord.var.at(s.d);
  s.jmap = ord.jmap.at(s.d);
  QMatrix P(1, 1);
  P(0, 0) = 1;
  s.pairing[s.d] = P;
  return s;
}

inline IhSliceData ih_smooth_base_slice(int ambient) {
  IhSliceData s = ih_curve_germ_slice(CurveGermSpec{{2}}, ambient + 1);
  s.n = ambient;
  s.m = 1;
  s.k = ambient - 1;
  return s;
}

struct SliceViolation {
  std::string rule;
  int degree = 0;
  std::string group;
  std::string detail;
};

struct SliceVerdict {
  std::vector<SliceViolation> violations;
  bool ok() const { return violations.empty(); }
};

template <class R>
SliceVerdict validate_slice(const SliceData<R>& s) {
  SliceVerdict v;
  auto violate = [&v](std::string rule, int degree, std::string group, std::string detail) {
    v.violations.push_back({std::move(rule), degree, std::move(group), std::move(detail)});
  };

  if (!(1 <= s.m && s.m <= s.n))
    violate("dimension bounds", 0, "-", "need 1 <= m <= n");
  if (s.d < 0) violate("dimension bounds", 0, "-", "need d >= 0");
  if (s.m != s.n - s.k) violate("dimension bounds", 0, "-", "need m = n - k");

  for (const auto& [j, g] : s.abs) {
    if (g.is_trivial()) continue;
    if (j > s.d)
      violate("Proposition 2 range", j, "abs", "absolute group nonzero above degree d");
    if (j < 0 || j > 2 * s.d)
      violate("degree window", j, "abs", "nonzero group outside [0, 2d]");
  }
  for (const auto& [j, g] : s.rel) {
    if (g.is_trivial()) continue;
    if (j < 0 || j > 2 * s.d)
      violate("degree window", j, "rel", "nonzero group outside [0, 2d]");
  }

  for (const auto& [j, h] : s.var) {
    if (!h.source.same_presentation(s.rel_at(j)) || !h.target.same_presentation(s.abs_at(j)))
      violate("operator endpoints", j, "var", "variation does not map rel[j] to abs[j]");
    else if (!h.is_well_defined())
      violate("well-definedness", j, "var", "relator image escapes the relation lattice");
  }
  for (const auto& [j, h] : s.jmap) {
    if (!h.source.same_presentation(s.abs_at(j)) || !h.target.same_presentation(s.rel_at(j)))
      violate("operator endpoints", j, "jmap", "relativization does not map abs[j] to rel[j]");
    else if (!h.is_well_defined())
      violate("well-definedness", j, "jmap", "relator image escapes the relation lattice");
  }
  return v;
}

inline SliceVerdict validate_slice(const IhSliceData& s) {
  SliceVerdict v;
  auto violate = [&v](std::string rule, int degree, std::string group, std::string detail) {
    v.violations.push_back({std::move(rule), degree, std::move(group), std::move(detail)});
  };

  if (!(1 <= s.m && s.m <= s.n))
    violate("dimension bounds", 0, "-", "need 1 <= m <= n");
  if (s.d < 0) violate("dimension bounds", 0, "-", "need d >= 0");
  if (s.m != s.n - s.k) violate("dimension bounds", 0, "-", "need m = n - k");

  for (const auto& [i, g] : s.abs) {
    if (g.is_trivial()) continue;
    if (i > s.d)
      violate("Proposition 2 range", i, "abs",
              "intersection homology nonzero above the middle degree");
    if (i < 0) violate("degree window", i, "abs", "negative degree");
    if (!g.is_free() || g.rank() != g.gens())
      violate("free presentation", i, "abs", "field-coefficient groups must be relation-free");
  }
  for (const auto& [j, g] : s.rel) {
    if (g.is_trivial()) continue;
    if (j < s.d)
      violate("Proposition 2 range", j, "rel",
              "relative intersection homology nonzero below the middle degree");
    if (!g.is_free() || g.rank() != g.gens())
      violate("free presentation", j, "rel", "field-coefficient groups must be relation-free");
  }

  if (s.var.matrix.rows() != s.abs_at(s.d).gens() ||
      s.var.matrix.cols() != s.rel_at(s.d).gens())
    violate("operator endpoints", s.d, "var", "variation must act in the middle degree");
  if (s.jmap.matrix.rows() != s.rel_at(s.d).gens() ||
      s.jmap.matrix.cols() != s.abs_at(s.d).gens())
    violate("operator endpoints", s.d, "jmap", "relativization must act in the middle degree");

  for (const auto& [i, P] : s.pairing) {
    const auto left = s.rel_at(2 * s.d - i);
    const auto right = s.abs_at(i);
    if (P.rows() != left.gens() || P.cols() != right.gens()) {
      violate("pairing shape", i, "pairing",
              "matrix must pair rel[2d-i] with abs[i] generator-for-generator");
      continue;
    }
    if (!pairing_check(P, left, right).nondegenerate)
      violate("nondegenerate pairing", i, "pairing", "intersection pairing is degenerate");
  }
  for (const auto& [i, g] : s.abs) {
    if (g.is_trivial()) continue;
    if (!s.pairing.count(i))
      violate("nondegenerate pairing", i, "pairing", "missing pairing for a nonzero degree");
  }
  return v;
}

}  // namespace strata
