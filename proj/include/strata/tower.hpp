#pragma once

#include "strata/slice.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace strata {

// The companion summand appearing in the relative group one level up:
// a quotient part (absolute cycles mod the variation image, nonzero only
// when stepping off the base level) glued to a kernel part coming from
// one degree lower. Over Z the gluing is an extension that the tower
// cannot always resolve; the carried presentation is the split one and
// the flag records whether that is forced or a convention.
template <class R>
struct ExtraSummand {
  AbelianGroup<R> quotient_part;
  AbelianGroup<R> kernel_part;
  GroupHom<R> quotient_inj;      // quotient_part -> rel group of the new level
  GroupHom<R> kernel_inj;        // kernel_part   -> rel group of the new level
  GroupHom<R> kernel_incl_prev;  // kernel_part   -> rel group one level and one degree down
  bool split = true;

  bool is_trivial() const { return quotient_part.is_trivial() && kernel_part.is_trivial(); }
  std::size_t gens() const { return quotient_part.gens() + kernel_part.gens(); }
};

template <class R>
struct TowerLevel {
  int r = 0;
  int m = 0;  // base level of the tower this belongs to
  int d = 0;  // middle complex dimension of the base slice

  std::map<int, AbelianGroup<R>> rel;
  std::map<int, AbelianGroup<R>> abs;
  std::map<int, GroupHom<R>> var;   // rel[j] -> abs[j]
  std::map<int, GroupHom<R>> jmap;  // abs[j] -> rel[j]

  // Identifications coming from the previous level; absent at the base.
  std::map<int, GroupHom<R>> sigma;  // abs[j-1] one level down -> abs[j]
  std::map<int, GroupHom<R>> embed;  // abs[j-1] one level down -> rel[j]
  std::map<int, ExtraSummand<R>> extra;

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

  // id + var o jmap on the absolute group.
  GroupHom<R> monodromy_abs(int j) const {
    auto g = abs_at(j);
    return hom_sum(GroupHom<R>::identity(g), compose(var_at(j), jmap_at(j)));
  }
  // id + jmap o var on the relative group.
  GroupHom<R> monodromy_rel(int j) const {
    auto g = rel_at(j);
    return hom_sum(GroupHom<R>::identity(g), compose(jmap_at(j), var_at(j)));
  }

  std::vector<int> degrees() const {
    std::map<int, bool> keys;
    for (const auto& [j, g] : rel) keys[j] = true;
    for (const auto& [j, g] : abs) keys[j] = true;
    std::vector<int> out;
    for (const auto& [j, b] : keys) out.push_back(j);
    return out;
  }

 private:
  static AbelianGroup<R> group_at(const std::map<int, AbelianGroup<R>>& m_, int j) {
    auto it = m_.find(j);
    return it == m_.end() ? AbelianGroup<R>::trivial() : it->second;
  }
};

// One stabilization step r -> r+1. Absolute groups shift a degree up
// unchanged; the relative group in degree j+1 becomes the old absolute
// group in degree j plus the extra summand built from the cokernel in
// degree j and the kernel in degree j-1 of the old variation. The new
// variation is the shift identification on the embedded part and zero on
// the extra summand; the new relativization of a shifted class a is
// -embed(2a + var(jmap(a))), plus (over Z, off the base level only the
// quotient part vanishes anyway) a correction by the class of a in the
// quotient part.
template <class R>
TowerLevel<R> stabilize_step(const TowerLevel<R>& level) {
  using Scalar = typename R::Scalar;
  TowerLevel<R> next;
  next.r = level.r + 1;
  next.m = level.m;
  next.d = level.d;

  std::map<int, Subquotients<R>> subq;
  for (int j : level.degrees()) subq.emplace(j, hom_subquotients(level.var_at(j)));

  std::map<int, bool> target_degrees;  // degrees j+1 of the new relative groups
  for (const auto& [j, g] : level.abs)
    if (!g.is_trivial()) target_degrees[j + 1] = true;
  for (const auto& [j, sq] : subq)
    if (!sq.kernel.is_trivial()) target_degrees[j + 2] = true;

  const bool correction = (level.r == level.m) && !R::is_field;

  for (const auto& [jn, unused] : target_degrees) {
    const int j = jn - 1;  // degree at the previous level feeding the embed part
    AbelianGroup<R> prev_abs = level.abs_at(j);
    if (prev_abs.is_trivial()) prev_abs = AbelianGroup<R>::trivial();

    AbelianGroup<R> quot =
        subq.count(j) ? subq.at(j).cokernel : AbelianGroup<R>::trivial();
    AbelianGroup<R> kern =
        subq.count(j - 1) ? subq.at(j - 1).kernel : AbelianGroup<R>::trivial();
    GroupHom<R> kern_incl = subq.count(j - 1)
                                ? subq.at(j - 1).kernel_incl
                                : GroupHom<R>::zero(kern, level.rel_at(j - 1));
    // Presentations of zero groups would only inject phantom generators.
    if (quot.is_trivial()) quot = AbelianGroup<R>::trivial();
    if (kern.is_trivial()) {
      kern = AbelianGroup<R>::trivial();
      kern_incl = GroupHom<R>::zero(kern, level.rel_at(j - 1));
    }

    AbelianGroup<R> relg(
        prev_abs.gens() + quot.gens() + kern.gens(),
        Matrix<R>::block_diag(Matrix<R>::block_diag(prev_abs.relations(), quot.relations()),
                              kern.relations()));

    const std::size_t ga = prev_abs.gens(), gq = quot.gens(), gk = kern.gens();
    auto block_inj = [&](std::size_t offset, std::size_t width) {
      Matrix<R> m(ga + gq + gk, width);
      for (std::size_t i = 0; i < width; ++i) m(offset + i, i) = 1;
      return m;
    };

    if (!prev_abs.is_trivial() || ga > 0) {
      next.abs[jn] = prev_abs;
      next.sigma[jn] = GroupHom<R>(prev_abs, prev_abs, Matrix<R>::identity(ga));
    }
    next.rel[jn] = relg;

    ExtraSummand<R> ex;
    ex.quotient_part = quot;
    ex.kernel_part = kern;
    ex.quotient_inj = GroupHom<R>(quot, relg, block_inj(ga, gq));
    ex.kernel_inj = GroupHom<R>(kern, relg, block_inj(ga + gq, gk));
    ex.kernel_incl_prev = kern_incl;
    ex.split = R::is_field || kern.is_free() || quot.is_trivial();
    next.extra[jn] = ex;

    next.embed[jn] = GroupHom<R>(prev_abs, relg, block_inj(0, ga));

    if (next.abs.count(jn)) {
      // var: identity on the embedded block, zero on the extra summand.
      Matrix<R> vmat(ga, ga + gq + gk);
      for (std::size_t i = 0; i < ga; ++i) vmat(i, i) = 1;
      next.var[jn] = GroupHom<R>(relg, next.abs.at(jn), vmat);

      Matrix<R> vj = level.var_at(j).matrix * level.jmap_at(j).matrix;
      Matrix<R> top = -(Matrix<R>::identity(ga) * Scalar(2) + vj);
      Matrix<R> jmat(ga + gq + gk, ga);
      for (std::size_t i = 0; i < ga; ++i)
        for (std::size_t c = 0; c < ga; ++c) jmat(i, c) = top(i, c);
      if (correction && gq > 0) {
        // The cokernel is presented on the same generators, so the class
        // of a in the quotient part has the same coordinates as a.
        for (std::size_t i = 0; i < ga; ++i) jmat(ga + i, i) = -1;
      }
      next.jmap[jn] = GroupHom<R>(next.abs.at(jn), relg, jmat);
    } else {
      next.var[jn] = GroupHom<R>::zero(relg, AbelianGroup<R>::trivial());
    }
  }
  return next;
}

template <class R>
struct Tower {
  SliceData<R> base;
  int n = 0;
  std::vector<TowerLevel<R>> levels;  // levels[i] is level m + i

  const TowerLevel<R>& level(int r) const {
    if (r < base.m || r > n) throw std::out_of_range("tower level out of range");
    return levels[static_cast<std::size_t>(r - base.m)];
  }

  // stab at level r in degree j: embed one level up composed with var.
  GroupHom<R> stab_hom(int r, int j) const {
    const TowerLevel<R>& lo = level(r);
    const TowerLevel<R>& hi = level(r + 1);
    auto it = hi.embed.find(j + 1);
    GroupHom<R> emb = it != hi.embed.end()
                          ? it->second
                          : GroupHom<R>::zero(lo.abs_at(j), hi.rel_at(j + 1));
    return compose(emb, lo.var_at(j));
  }

  // stab^(r_to - r_from) starting in degree j at level r_from.
  GroupHom<R> stab_power(int r_from, int r_to, int j) const {
    GroupHom<R> acc = GroupHom<R>::identity(level(r_from).rel_at(j));
    for (int r = r_from; r < r_to; ++r) acc = compose(stab_hom(r, j + (r - r_from)), acc);
    return acc;
  }
};

template <class R>
TowerLevel<R> tower_base_level(const SliceData<R>& slice) {
  TowerLevel<R> base;
  base.r = slice.m;
  base.m = slice.m;
  base.d = slice.d;
  std::map<int, bool> keys;
  for (const auto& [j, g] : slice.rel) keys[j] = true;
  for (const auto& [j, g] : slice.abs) keys[j] = true;
  for (const auto& [j, unused] : keys) {
    AbelianGroup<R> rg = slice.rel_at(j), ag = slice.abs_at(j);
    base.rel[j] = rg;
    base.abs[j] = ag;
    base.var[j] = slice.var_at(j);
    base.jmap[j] = slice.jmap_at(j);
  }
  return base;
}

template <class R>
Tower<R> build_tower(const SliceData<R>& slice, int n) {
  if (n < slice.m) throw std::invalid_argument("ambient dimension below the slice level");
  auto verdict = validate_slice(slice);
  if (!verdict.ok())
    throw std::invalid_argument("slice fails validation: " + verdict.violations.front().rule);
  Tower<R> t;
  t.base = slice;
  t.n = n;
  t.levels.push_back(tower_base_level(slice));
  for (int r = slice.m; r < n; ++r) t.levels.push_back(stabilize_step(t.levels.back()));
  return t;
}

// Variation of the s-fold iterated loop: var o (id + mono + ... +
// mono^{s-1}) with mono the relative monodromy. s = 0 gives the zero map.
template <class R>
std::map<int, GroupHom<R>> iterated_variation(const TowerLevel<R>& level, int s) {
  if (s < 0) throw std::invalid_argument("iteration count must be nonnegative");
  std::map<int, GroupHom<R>> out;
  for (const auto& [j, rg] : level.rel) {
    Matrix<R> mono = level.monodromy_rel(j).matrix;
    Matrix<R> acc(rg.gens(), rg.gens());
    Matrix<R> power = Matrix<R>::identity(rg.gens());
    for (int i = 0; i < s; ++i) {
      acc = acc + power;
      power = mono * power;
    }
    out.emplace(j, GroupHom<R>(rg, level.abs_at(j), level.var_at(j).matrix * acc));
  }
  return out;
}

// Localized global monodromy: id + incl o var o restr, where restr maps
// an ambient group into the relative group of degree j and incl maps the
// absolute group of degree j back.
template <class R>
GroupHom<R> global_monodromy(const TowerLevel<R>& level, int j, const GroupHom<R>& restr,
                             const GroupHom<R>& incl) {
  if (!restr.target.same_presentation(level.rel_at(j)))
    throw std::invalid_argument("restriction must land in the relative group of degree j");
  if (!incl.source.same_presentation(level.abs_at(j)))
    throw std::invalid_argument("inclusion must start from the absolute group of degree j");
  if (incl.target.gens() != restr.source.gens())
    throw std::invalid_argument("ambient groups of restriction and inclusion disagree");
  GroupHom<R> loop = compose(incl, compose(level.var_at(j), restr));
  return hom_sum(GroupHom<R>::identity(restr.source), loop);
}

// Homology of the deleted neighbourhood of the singular fibre: in each
// degree i an extension of ker(var_{i-1}) by coker(var_i). Over a field
// the ranks add; over Z the middle group is pinned between the split
// bounds unless the kernel part is free.
template <class R>
struct LinkComplementEntry {
  AbelianGroup<R> sub;   // coker(var_i), included in the middle group
  AbelianGroup<R> quot;  // ker(var_{i-1}), quotient of the middle group
  std::size_t free_rank = 0;
  bool resolved = true;  // middle group equals sub + quot on the nose
};

template <class R>
std::map<int, LinkComplementEntry<R>> link_complement_homology(const SliceData<R>& slice) {
  std::map<int, Subquotients<R>> subq;
  std::map<int, bool> keys;
  for (const auto& [j, g] : slice.rel) keys[j] = true;
  for (const auto& [j, g] : slice.abs) keys[j] = true;
  for (const auto& [j, unused] : keys) subq.emplace(j, hom_subquotients(slice.var_at(j)));

  std::map<int, LinkComplementEntry<R>> out;
  for (const auto& [j, sq] : subq) {
    if (!sq.cokernel.is_trivial()) {
      auto& e = out[j];
      e.sub = sq.cokernel;
    }
    if (!sq.kernel.is_trivial()) {
      auto& e = out[j + 1];
      e.quot = sq.kernel;
    }
  }
  for (auto& [i, e] : out) {
    e.free_rank = e.sub.rank() + e.quot.rank();
    e.resolved = R::is_field || e.quot.is_free();
  }
  return out;
}

}  // namespace strata
