#include "strata/checks.hpp"
#include "strata/tower.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace strata;

namespace {

ZMatrix scalar1(long long v) {
  ZMatrix m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace

TEST_CASE("smooth base: the parity recursion of var o jmap") {
  auto tower = build_tower(smooth_pl_base_slice<ZRing>(), 7);
  const int m = 1;
  // Base composite is -2; afterwards it alternates 0, -2, 0, -2, ...
  for (int l = 0; l <= 6; ++l) {
    const auto& lvl = tower.level(m + l);
    int j = l;  // middle degree at this level
    ZMatrix vj = lvl.var_at(j).matrix * lvl.jmap_at(j).matrix;
    if (l % 2 == 0)
      REQUIRE(vj == scalar1(-2));
    else
      REQUIRE(vj.is_zero());
    // Relative monodromy squares to the identity at even steps.
    if (l % 2 == 0) {
      ZMatrix mono = lvl.monodromy_rel(j).matrix;
      REQUIRE(mono * mono == ZMatrix::identity(mono.rows()));
    }
  }
  REQUIRE(check_cor2(tower).all_pass());
  REQUIRE(check_stab_identities(tower).all_pass());
  REQUIRE(check_prop2(tower).all_pass());
  REQUIRE(check_prop3(tower).all_pass());
}

TEST_CASE("multiplicity-two germ stabilized one step") {
  auto tower = build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{2}}), 3);
  const auto& lvl = tower.level(3);
  REQUIRE(lvl.rel_at(1).is_free());
  REQUIRE(lvl.rel_at(1).rank() == 1);
  REQUIRE(lvl.abs_at(1).rank() == 1);
  // var was onto at the base, so no quotient part survives.
  REQUIRE(lvl.extra.at(1).quotient_part.is_trivial());
  REQUIRE(lvl.extra.at(1).kernel_part.is_trivial());
  // jmap_3(shift of e) = -embed(2e - 2e) = 0.
  REQUIRE(lvl.jmap_at(1).matrix.is_zero());
}

TEST_CASE("(2,1) germ: extra summand bookkeeping") {
  auto slice = curve_germ_slice<ZRing>(CurveGermSpec{{2, 1}});
  auto tower = build_tower(slice, 3);
  const auto& lvl = tower.level(3);

  REQUIRE(lvl.rel_at(1).rank() == 3);
  const auto& ex1 = lvl.extra.at(1);
  REQUIRE(ex1.quotient_part.rank() == 1);
  REQUIRE(ex1.quotient_part.is_free());
  REQUIRE(ex1.kernel_part.is_trivial());

  const auto& ex2 = lvl.extra.at(2);
  REQUIRE(ex2.quotient_part.is_trivial());
  REQUIRE(ex2.kernel_part.rank() == 1);
  REQUIRE(lvl.rel_at(2).rank() == 1);
  REQUIRE(lvl.abs_at(2).is_trivial());

  // Over Z the first step carries the correction class of the quotient
  // part in the relativization: the class of e_2 survives in the
  // cokernel, the class of e_1 = var(p_0) dies there.
  const std::size_t ga = lvl.abs_at(1).gens();
  const auto& jm = lvl.jmap_at(1).matrix;
  REQUIRE(jm.rows() == ga + ex1.quotient_part.gens());
  auto qblock = [&](std::size_t col) {
    ZMatrix v(ex1.quotient_part.gens(), 1);
    for (std::size_t i = 0; i < ex1.quotient_part.gens(); ++i) v(i, 0) = jm(ga + i, col);
    return v;
  };
  REQUIRE(ex1.quotient_part.element_is_zero(qblock(0)));
  REQUIRE_FALSE(ex1.quotient_part.element_is_zero(qblock(1)));

  // Over Q there is no correction.
  auto towerq = build_tower(curve_germ_slice<QRing>(CurveGermSpec{{2, 1}}), 3);
  const auto& lvlq = towerq.level(3);
  const auto& jq = lvlq.jmap_at(1).matrix;
  for (std::size_t i = lvlq.abs_at(1).gens(); i < jq.rows(); ++i)
    for (std::size_t c = 0; c < jq.cols(); ++c) REQUIRE(jq(i, c) == 0);
}

TEST_CASE("tower construction basics") {
  SECTION("n = m returns the slice itself") {
    auto slice = curve_germ_slice<ZRing>(CurveGermSpec{{3, 1}});
    auto tower = build_tower(slice, 2);
    REQUIRE(tower.levels.size() == 1);
    REQUIRE(tower.level(2).rel_at(0).same_presentation(slice.rel.at(0)));
  }
  SECTION("single point germ has a trivial tower") {
    auto tower = build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{1}}), 5);
    for (const auto& lvl : tower.levels)
      for (int j : lvl.degrees()) {
        REQUIRE(lvl.rel_at(j).is_trivial());
        REQUIRE(lvl.abs_at(j).is_trivial());
      }
  }
  SECTION("ambient below the slice level is rejected") {
    REQUIRE_THROWS_AS(build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{2}}), 1),
                      std::invalid_argument);
  }
  SECTION("trivial-multiplicity germ of three points, full shape") {
    auto tower = build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{3}}), 3);
    REQUIRE(tower.level(3).rel_at(1).rank() == 2);
    REQUIRE(tower.level(3).abs_at(1).rank() == 2);
  }
}

TEST_CASE("iterated variation") {
  SECTION("morse slice law: 2r times the generator") {
    auto tower = build_tower(transverse_morse_slice<ZRing>(3), 3);
    const auto& lvl = tower.level(3);
    for (int r = 0; r <= 4; ++r) {
      auto it = iterated_variation(lvl, r).at(1);
      REQUIRE(it.matrix == scalar1(2 * r));
    }
  }
  SECTION("six-fold iterate dies for the cubic germ in ambient three") {
    auto tower = build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{3}}), 3);
    auto it = iterated_variation(tower.level(3), 6).at(1);
    REQUIRE(it.is_zero_map());
    REQUIRE_FALSE(iterated_variation(tower.level(3), 3).at(1).is_zero_map());
  }
  SECTION("zero iterations give the zero map") {
    auto tower = build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{3, 2}}), 4);
    for (const auto& [j, h] : iterated_variation(tower.level(4), 0))
      REQUIRE(h.matrix.is_zero());
  }
  SECTION("composition rule of loop iteration") {
    auto tower = build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{3, 2}}), 4);
    for (int r = 2; r <= 4; ++r) {
      const auto& lvl = tower.level(r);
      for (int s = 0; s <= 4; ++s)
        for (int t = 0; t <= 4; ++t)
          for (int j : lvl.degrees()) {
            if (!lvl.rel.count(j)) continue;
            auto vs = iterated_variation(lvl, s).at(j);
            auto vt = iterated_variation(lvl, t).at(j);
            auto vst = iterated_variation(lvl, s + t).at(j);
            ZMatrix mono = lvl.monodromy_rel(j).matrix;
            ZMatrix pow = ZMatrix::identity(mono.rows());
            for (int i = 0; i < s; ++i) pow = mono * pow;
            REQUIRE(vst.matrix == vs.matrix + vt.matrix * pow);
          }
    }
  }
}

TEST_CASE("global monodromy localization") {
  auto slice = curve_germ_slice<ZRing>(CurveGermSpec{{2, 1}});
  auto tower = build_tower(slice, 2);
  const auto& lvl = tower.level(2);

  SECTION("restriction by jmap reproduces the local monodromy") {
    auto g = global_monodromy(lvl, 0, lvl.jmap_at(0), GroupHom<ZRing>::identity(lvl.abs_at(0)));
    REQUIRE(g.matrix == lvl.monodromy_abs(0).matrix);
  }
  SECTION("zero inclusion gives the identity") {
    auto zero_incl = GroupHom<ZRing>::zero(lvl.abs_at(0), lvl.abs_at(0));
    auto g = global_monodromy(lvl, 0, lvl.jmap_at(0), zero_incl);
    REQUIRE(g.matrix.is_identity());
  }
  SECTION("canonical maps recover the point permutation") {
    // Ambient group: the relative group itself; restriction identity,
    // inclusion jmap. The composite is the relative monodromy, a
    // permutation action of order two on the three points.
    auto g = global_monodromy(lvl, 0, GroupHom<ZRing>::identity(lvl.rel_at(0)),
                              lvl.jmap_at(0));
    REQUIRE(g.matrix == lvl.monodromy_rel(0).matrix);
    REQUIRE(g.matrix * g.matrix == ZMatrix::identity(2));
  }
  SECTION("mismatched endpoints are rejected") {
    auto ambient = AbelianGroup<ZRing>::free_group(3);
    REQUIRE_THROWS_AS(global_monodromy(lvl, 0, GroupHom<ZRing>::identity(ambient),
                                       lvl.jmap_at(0)),
                      std::invalid_argument);
  }
}

TEST_CASE("link complement homology") {
  SECTION("(2,1) germ gives rank one in degrees zero and one") {
    auto entries = link_complement_homology(curve_germ_slice<ZRing>(CurveGermSpec{{2, 1}}));
    REQUIRE(entries.at(0).free_rank == 1);
    REQUIRE(entries.at(0).sub.rank() == 1);
    REQUIRE(entries.at(1).free_rank == 1);
    REQUIRE(entries.at(1).quot.rank() == 1);
  }
  SECTION("isomorphic variation leaves nothing") {
    auto entries = link_complement_homology(curve_germ_slice<ZRing>(CurveGermSpec{{3}}));
    REQUIRE(entries.empty());
  }
  SECTION("zero variation adds both sides") {
    auto slice = curve_germ_slice<ZRing>(CurveGermSpec{{1, 1, 1}});
    auto entries = link_complement_homology(slice);
    REQUIRE(entries.at(0).free_rank == 2);  // coker = abs
    REQUIRE(entries.at(1).free_rank == 2);  // ker = rel
  }
}

TEST_CASE("curve germ stabilization report") {
  SECTION("nu = 2, n = 3: the printed variation law") {
    auto rep = proposition4_report(2, 3);
    REQUIRE(rep.checks.all_pass());
    REQUIRE(rep.parity_case == "odd ambient dimension, even multiplicity");
    bool found = false;
    for (const auto& line : rep.checks.lines)
      if (line.label == "var(G1) equals the alternating class" ||
          line.label == "var(G1) equals the alternating class")
        found = true;
    for (const auto& line : rep.checks.lines)
      if (line.label.find("= 0") != std::string::npos) found = found || line.pass;
    REQUIRE(found);
  }
  SECTION("even ambient dimension vanishing") {
    REQUIRE(proposition4_report(2, 4).checks.all_pass());
    REQUIRE(proposition4_report(4, 4).checks.all_pass());
  }
  SECTION("odd-odd vanishing") {
    REQUIRE(proposition4_report(3, 3).checks.all_pass());
    REQUIRE(proposition4_report(3, 5).checks.all_pass());
  }
  SECTION("group shapes for all small cases") {
    for (int nu = 1; nu <= 4; ++nu)
      for (int n = 3; n <= 5; ++n) REQUIRE(proposition4_report(nu, n).checks.all_pass());
  }
}

TEST_CASE("periodicity") {
  SECTION("smooth base is periodic from the bottom") {
    auto tower = build_tower(smooth_pl_base_slice<ZRing>(), 6);
    auto rep = periodicity_check(tower);
    REQUIRE(rep.applicable);
    REQUIRE(rep.first_iso_level == 1);
    for (const auto& lv : rep.levels) {
      REQUIRE(lv.var_iso);
      if (lv.has_stab) REQUIRE(lv.stab_iso);
      if (lv.has_sigma2) {
        REQUIRE(lv.sigma2_var);
        REQUIRE(lv.sigma2_jmap);
      }
    }
    REQUIRE(rep.to_check().all_pass());
  }
  SECTION("non-injective variation never becomes one") {
    auto tower = build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{2, 1}}), 4);
    auto rep = periodicity_check(tower);
    REQUIRE_FALSE(rep.applicable);
    for (const auto& lv : rep.levels) REQUIRE_FALSE(lv.var_iso);
    // The commutation identities hold regardless.
    for (const auto& lv : rep.levels)
      if (lv.has_sigma2) {
        REQUIRE(lv.sigma2_var);
        REQUIRE(lv.sigma2_jmap);
      }
    REQUIRE(rep.to_check().not_applicable);
  }
  SECTION("trivial slice passes vacuously") {
    auto tower = build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{1}}), 4);
    auto rep = periodicity_check(tower);
    REQUIRE(rep.applicable);
    REQUIRE(rep.to_check().all_pass());
  }
}

TEST_CASE("tower invariants across bases") {
  for (const auto& mults : std::vector<std::vector<int>>{{2}, {3}, {2, 1}, {1, 1}, {2, 2}}) {
    auto tower = build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{mults}}), 5);
    CAPTURE(mults.size());
    REQUIRE(check_prop2(tower).all_pass());
    REQUIRE(check_stab_identities(tower).all_pass());
    REQUIRE(check_cor2(tower).all_pass());
    REQUIRE(check_prop3(tower).all_pass());
  }
  auto towerq = build_tower(curve_germ_slice<QRing>(CurveGermSpec{{2, 1}}), 5);
  REQUIRE(check_prop2(towerq).all_pass());
  REQUIRE(check_stab_identities(towerq).all_pass());
  REQUIRE(check_cor2(towerq).all_pass());
}

TEST_CASE("unresolved extensions over Z are flagged, split over Q") {
  // Torsion kernel one degree below a nontrivial cokernel.
  SliceData<ZRing> s;
  s.n = 4;
  s.k = 2;
  s.m = 2;
  s.d = 1;
  s.rel[0] = AbelianGroup<ZRing>(1, ZMatrix::from_rows({{2}}));
  s.abs[1] = AbelianGroup<ZRing>::free_group(1);
  s.rel[1] = AbelianGroup<ZRing>::free_group(0);
  s.abs[0] = AbelianGroup<ZRing>::free_group(0);
  REQUIRE(validate_slice(s).ok());

  auto tower = build_tower(s, 3);
  const auto& ex = tower.level(3).extra.at(2);
  REQUIRE_FALSE(ex.quotient_part.is_trivial());
  REQUIRE_FALSE(ex.kernel_part.is_free());
  REQUIRE_FALSE(ex.split);
  // The carried group uses the split presentation: the embedded copy of
  // abs[1] and the free quotient part contribute rank two, the torsion
  // kernel part its factor.
  REQUIRE(tower.level(3).rel_at(2).rank() == 2);
  REQUIRE(tower.level(3).rel_at(2).invariant_factors() == std::vector<Int>{Int(2)});

  // Over Q the same shape splits.
  SliceData<QRing> sq;
  sq.n = s.n;
  sq.k = s.k;
  sq.m = s.m;
  sq.d = s.d;
  sq.rel[0] = AbelianGroup<QRing>::free_group(1);
  sq.abs[1] = AbelianGroup<QRing>::free_group(1);
  auto towerq = build_tower(sq, 3);
  REQUIRE(towerq.level(3).extra.at(2).split);
}

TEST_CASE("random free slices keep every tower invariant") {
  std::mt19937 rng(0x70432);
  std::uniform_int_distribution<int> ddist(0, 2);
  std::uniform_int_distribution<std::size_t> gdist(0, 3);
  std::uniform_int_distribution<long long> val(-3, 3);
  for (int trial = 0; trial < 12; ++trial) {
    SliceData<ZRing> s;
    s.d = ddist(rng);
    s.m = 2;
    s.k = 0;
    s.n = 2;
    for (int j = 0; j <= s.d; ++j) {
      std::size_t gr = gdist(rng), ga = gdist(rng);
      s.rel[j] = AbelianGroup<ZRing>::free_group(gr);
      s.abs[j] = AbelianGroup<ZRing>::free_group(ga);
      ZMatrix v(ga, gr), jm(gr, ga);
      for (std::size_t a = 0; a < ga; ++a)
        for (std::size_t b = 0; b < gr; ++b) v(a, b) = val(rng);
      for (std::size_t a = 0; a < gr; ++a)
        for (std::size_t b = 0; b < ga; ++b) jm(a, b) = val(rng);
      s.var[j] = GroupHom<ZRing>(s.rel[j], s.abs[j], v);
      s.jmap[j] = GroupHom<ZRing>(s.abs[j], s.rel[j], jm);
    }
    // A relative group above the middle degree feeds the kernel chains.
    if (s.d >= 1) s.rel[s.d + 1] = AbelianGroup<ZRing>::free_group(gdist(rng));
    REQUIRE(validate_slice(s).ok());
    auto tower = build_tower(s, 5);
    CAPTURE(trial);
    REQUIRE(check_prop2(tower).all_pass());
    REQUIRE(check_stab_identities(tower).all_pass());
    REQUIRE(check_cor2(tower).all_pass());
    REQUIRE(check_prop3(tower).all_pass());
    auto rep = periodicity_check(tower);
    for (const auto& lv : rep.levels)
      if (lv.has_sigma2) {
        REQUIRE(lv.sigma2_var);
        REQUIRE(lv.sigma2_jmap);
      }
  }
}

TEST_CASE("towers over Z and Q agree on ranks") {
  for (const auto& mults : std::vector<std::vector<int>>{{2, 1}, {3, 2}, {1, 1, 2}}) {
    auto tz = build_tower(curve_germ_slice<ZRing>(CurveGermSpec{{mults}}), 5);
    auto tq = build_tower(curve_germ_slice<QRing>(CurveGermSpec{{mults}}), 5);
    for (int r = 2; r <= 5; ++r) {
      const auto& lz = tz.level(r);
      const auto& lq = tq.level(r);
      for (int j : lz.degrees()) {
        REQUIRE(lz.rel_at(j).rank() == lq.rel_at(j).rank());
        REQUIRE(lz.abs_at(j).rank() == lq.abs_at(j).rank());
      }
    }
  }
}

TEST_CASE("example-law check wrappers") {
  REQUIRE(check_example1(CurveGermSpec{{2, 1}}).all_pass());
  REQUIRE(check_example1(CurveGermSpec{{4, 1, 1}}).all_pass());
  REQUIRE(check_example2(4).all_pass());
  REQUIRE(check_example2(3).all_pass());
  REQUIRE(check_lemma5(curve_germ_slice<ZRing>(CurveGermSpec{{2, 1}})).all_pass());
}
