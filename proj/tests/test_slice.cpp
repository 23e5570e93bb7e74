#include "strata/slice.hpp"
#include "strata/slice_io.hpp"

#include "oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace strata;

namespace {

// Permutation-model oracle for curve germs: work in the free module on
// all u points, with the monodromy as an honest permutation matrix, and
// derive var on the quotient/subspace bases independently of the
// generator code.
struct GermModel {
  int u = 0;
  ZMatrix perm;  // u x u permutation of the monodromy

  explicit GermModel(const CurveGermSpec& spec) : u(spec.total()), perm(spec.total(), spec.total()) {
    int base = 0;
    for (int mult : spec.mults) {
      for (int t = 0; t < mult; ++t) perm((base + (t + 1) % mult), (base + t)) = 1;
      base += mult;
    }
  }

  // var on the relative basis p_0..p_{u-2}: perm(p_t) - p_t, rewritten in
  // the difference basis e_a = p_a - p_0. The image has zero coefficient
  // sum, so dropping the p_0 coordinate loses nothing.
  ZMatrix var_matrix() const {
    ZMatrix out(u - 1, u - 1);
    for (int t = 0; t < u - 1; ++t) {
      ZMatrix p(u, 1);
      p(t, 0) = 1;
      ZMatrix img = perm * p;
      ZMatrix col(u - 1, 1);
      for (int a = 1; a < u; ++a) col(a - 1, 0) = img(a, 0);
      if (t >= 1) col(t - 1, 0) -= 1;
      out.set_col(t, col);
    }
    return out;
  }
};

std::string write_temp(const std::string& name, const std::string& text) {
  auto dir = std::filesystem::temp_directory_path() / "strata_slice_tests";
  std::filesystem::create_directories(dir);
  auto path = (dir / name).string();
  std::ofstream f(path, std::ios::binary);
  f << text;
  return path;
}

}  // namespace

TEST_CASE("curve germ slices match the permutation oracle") {
  for (const auto& mults : std::vector<std::vector<int>>{
           {2}, {3}, {4}, {1, 1}, {2, 1}, {3, 2}, {2, 2, 1}, {1, 1, 1}}) {
    CurveGermSpec spec{mults};
    auto s = curve_germ_slice<ZRing>(spec);
    GermModel model(spec);
    REQUIRE(s.var.at(0).matrix == model.var_matrix());
    REQUIRE(s.var.at(0).is_well_defined());
    REQUIRE(s.jmap.at(0).is_well_defined());
  }
}

TEST_CASE("example laws for curve germs") {
  SECTION("two simple branches have trivial variation") {
    auto s = curve_germ_slice<ZRing>(CurveGermSpec{{1, 1}});
    REQUIRE(s.var.at(0).matrix.is_zero());
    auto sq = hom_subquotients(s.var.at(0));
    REQUIRE(sq.kernel.rank() == 1);
  }
  SECTION("multiplicity two branch") {
    auto s = curve_germ_slice<ZRing>(CurveGermSpec{{2}});
    REQUIRE(s.var.at(0).matrix == ZMatrix::from_rows({{1}}));
    REQUIRE(s.jmap.at(0).matrix == ZMatrix::from_rows({{-2}}));
    auto mono_rel = hom_sum(GroupHom<ZRing>::identity(s.rel.at(0)),
                            compose(s.jmap.at(0), s.var.at(0)));
    REQUIRE(mono_rel.matrix == ZMatrix::from_rows({{-1}}));
  }
  SECTION("(2,1): kernel, image and cokernel") {
    auto s = curve_germ_slice<ZRing>(CurveGermSpec{{2, 1}});
    auto sq = hom_subquotients(s.var.at(0));
    REQUIRE(sq.kernel.rank() == 1);
    REQUIRE(sq.image.rank() == 1);
    REQUIRE(sq.cokernel.rank() == 1);
    // Image is generated by p_1 - p_0.
    REQUIRE(sq.image_incl.target.elements_equal(s.var.at(0).matrix.col(0),
                                                ZMatrix::from_rows({{1}, {0}})));
  }
  SECTION("kernel law: dim ker var = s - 1, up to six points") {
    std::vector<std::vector<int>> lists;
    for (int a = 1; a <= 6; ++a) lists.push_back({a});
    for (int a = 1; a <= 5; ++a)
      for (int b = 1; a + b <= 6; ++b) lists.push_back({a, b});
    for (int a = 1; a <= 4; ++a)
      for (int b = 1; a + b <= 5; ++b)
        for (int c = 1; a + b + c <= 6; ++c) lists.push_back({a, b, c});
    for (const auto& mults : lists) {
      CurveGermSpec spec{mults};
      auto s = curve_germ_slice<ZRing>(spec);
      auto sq = hom_subquotients(s.var_at(0));
      REQUIRE(sq.kernel.rank() == mults.size() - 1);
      REQUIRE(sq.kernel.is_free());
      // Independent rank route.
      std::size_t r = oracle::rank_by_minors(s.var_at(0).matrix);
      REQUIRE((spec.total() - 1) - r == mults.size() - 1);
    }
  }
  SECTION("monodromy order divides the lcm of the multiplicities") {
    for (const auto& mults :
         std::vector<std::vector<int>>{{2}, {3}, {2, 1}, {2, 2}, {3, 2}, {1, 1, 2}}) {
      CurveGermSpec spec{mults};
      auto s = curve_germ_slice<ZRing>(spec);
      auto mono = hom_sum(GroupHom<ZRing>::identity(s.rel.at(0)),
                          compose(s.jmap.at(0), s.var.at(0)));
      long long L = 1;
      for (int m : mults) L = std::lcm(L, static_cast<long long>(m));
      ZMatrix acc = ZMatrix::identity(mono.matrix.rows());
      for (long long i = 0; i < L; ++i) acc = mono.matrix * acc;
      REQUIRE(acc == ZMatrix::identity(mono.matrix.rows()));
      // var followed by jmap equals monodromy minus identity.
      REQUIRE(compose(s.jmap.at(0), s.var.at(0)).matrix ==
              mono.matrix - ZMatrix::identity(mono.matrix.rows()));
    }
  }
  SECTION("empty multiplicity list is rejected") {
    REQUIRE_THROWS_AS(curve_germ_slice<ZRing>(CurveGermSpec{{}}), std::invalid_argument);
  }
}

TEST_CASE("transverse Morse slices") {
  SECTION("even slice dimension has trivial variation") {
    auto s = transverse_morse_slice<ZRing>(4);
    REQUIRE(s.d == 2);
    REQUIRE(s.var.at(2).matrix.is_zero());
    REQUIRE(s.jmap.at(2).matrix == ZMatrix::from_rows({{-2}}));
  }
  SECTION("odd slice dimension doubles") {
    auto s = transverse_morse_slice<ZRing>(3);
    REQUIRE(s.d == 1);
    REQUIRE(s.var.at(1).matrix == ZMatrix::from_rows({{2}}));
    REQUIRE(s.jmap.at(1).matrix.is_zero());
  }
  SECTION("var after jmap vanishes either way") {
    for (int m = 2; m <= 6; ++m) {
      auto s = transverse_morse_slice<ZRing>(m);
      REQUIRE(compose(s.var.at(s.d), s.jmap.at(s.d)).matrix.is_zero());
    }
  }
  SECTION("m = 2 coincides with the (1,1) germ data") {
    auto morse = transverse_morse_slice<ZRing>(2);
    auto germ = curve_germ_slice<ZRing>(CurveGermSpec{{1, 1}});
    REQUIRE(morse.var.at(0).matrix == germ.var.at(0).matrix);
    REQUIRE(morse.jmap.at(0).matrix == germ.jmap.at(0).matrix);
  }
  SECTION("m below 2 is rejected") {
    REQUIRE_THROWS_AS(transverse_morse_slice<ZRing>(1), std::invalid_argument);
  }
}

TEST_CASE("smooth base slice") {
  auto s = smooth_pl_base_slice<ZRing>();
  REQUIRE(s.m == 1);
  REQUIRE(s.d == 0);
  REQUIRE(s.rel.at(0).rank() == 1);
  REQUIRE(s.abs.at(0).rank() == 1);
  REQUIRE(compose(s.var.at(0), s.jmap.at(0)).matrix == ZMatrix::from_rows({{-2}}));
  REQUIRE(compose(s.jmap.at(0), s.var.at(0)).matrix == ZMatrix::from_rows({{-2}}));
  auto mono = hom_sum(GroupHom<ZRing>::identity(s.rel.at(0)),
                      compose(s.jmap.at(0), s.var.at(0)));
  REQUIRE(mono.matrix == ZMatrix::from_rows({{-1}}));
}

TEST_CASE("slice validation") {
  SECTION("generators validate cleanly") {
    REQUIRE(validate_slice(curve_germ_slice<ZRing>(CurveGermSpec{{3}})).ok());
    REQUIRE(validate_slice(transverse_morse_slice<ZRing>(5)).ok());
    REQUIRE(validate_slice(smooth_pl_base_slice<ZRing>()).ok());
  }
  SECTION("absolute group above the middle degree is flagged") {
    auto s = curve_germ_slice<ZRing>(CurveGermSpec{{2}});
    s.abs[2] = AbelianGroup<ZRing>::free_group(1);
    auto v = validate_slice(s);
    REQUIRE_FALSE(v.ok());
    bool found = false;
    for (const auto& viol : v.violations)
      if (viol.rule == "Proposition 2 range" && viol.degree == 2) found = true;
    REQUIRE(found);
  }
  SECTION("ill-defined operators are flagged") {
    SliceData<ZRing> s;
    s.n = 2;
    s.k = 0;
    s.m = 2;
    s.d = 0;
    s.rel[0] = AbelianGroup<ZRing>(1, ZMatrix::from_rows({{2}}));
    s.abs[0] = AbelianGroup<ZRing>::free_group(1);
    s.var[0] = GroupHom<ZRing>(s.rel[0], s.abs[0], ZMatrix::from_rows({{1}}));
    auto v = validate_slice(s);
    REQUIRE_FALSE(v.ok());
    bool found = false;
    for (const auto& viol : v.violations)
      if (viol.rule == "well-definedness" && viol.group == "var") found = true;
    REQUIRE(found);
  }
  SECTION("singular pairing is flagged on intersection slices") {
    IhSliceData s;
    s.n = 4;
    s.k = 2;
    s.m = 2;
    s.d = 0;
    auto g = AbelianGroup<QRing>::free_group(2);
    s.rel[0] = g;
    s.abs[0] = g;
    s.var = GroupHom<QRing>::zero(g, g);
    s.jmap = GroupHom<QRing>::zero(g, g);
    s.pairing[0] = to_rational(ZMatrix::from_rows({{1, 0}, {0, 0}}));
    auto v = validate_slice(s);
    REQUIRE_FALSE(v.ok());
    bool found = false;
    for (const auto& viol : v.violations)
      if (viol.rule == "nondegenerate pairing") found = true;
    REQUIRE(found);
  }
}

TEST_CASE("slice files round-trip") {
  SECTION("curve germ file equals the generator output group-by-group") {
    auto s = curve_germ_slice<ZRing>(CurveGermSpec{{2, 1}});
    auto path = write_temp("germ21.json", serialize_slice(s));
    auto loaded = load_slice(path);
    REQUIRE(std::holds_alternative<SliceData<ZRing>>(loaded));
    REQUIRE(std::get<SliceData<ZRing>>(loaded).same_presentation(s));
    // Byte-exact reserialization.
    REQUIRE(serialize_slice(loaded) == serialize_slice(s));
  }
  SECTION("empty file is a parse error") {
    auto path = write_temp("empty.json", "");
    REQUIRE_THROWS_AS(load_slice(path), SliceFormatError);
    try {
      load_slice(path);
    } catch (const SliceFormatError& e) {
      REQUIRE(std::string(e.what()).find("parse error") != std::string::npos);
    }
  }
  SECTION("wrong relation row count names the group and degree") {
    std::string text = R"({
  "schema": "strata-slice/1",
  "kind": "ordinary",
  "n": 2, "k": 0, "d": 0,
  "coeff": "Z",
  "groups": {
    "rel": {"0": {"gens": 2, "rels": [[1], [2], [3]]}},
    "abs": {"0": {"gens": 2, "rels": []}}
  },
  "var": {},
  "jmap": {}
})";
    auto path = write_temp("badrows.json", text);
    try {
      load_slice(path);
      FAIL("expected a format error");
    } catch (const SliceFormatError& e) {
      std::string msg = e.what();
      REQUIRE(msg.find("groups.rel.0") != std::string::npos);
      REQUIRE(msg.find("3 rows") != std::string::npos);
      REQUIRE(msg.find("expected 2") != std::string::npos);
    }
  }
  SECTION("schema mismatch is reported") {
    auto path = write_temp("badschema.json", R"({"schema": "strata-slice/9"})");
    REQUIRE_THROWS_AS(load_slice(path), SliceFormatError);
  }
  SECTION("intersection slices round-trip with rational pairings") {
    IhSliceData s;
    s.n = 5;
    s.k = 3;
    s.m = 2;
    s.d = 1;
    auto g2 = AbelianGroup<QRing>::free_group(2);
    auto g1 = AbelianGroup<QRing>::free_group(1);
    s.rel[1] = g2;
    s.abs[1] = g2;
    s.rel[2] = g1;
    s.abs[0] = g1;
    QMatrix var(2, 2);
    var(0, 0) = Rat(1) / Rat(2);
    s.var = GroupHom<QRing>(g2, g2, var);
    s.jmap = GroupHom<QRing>::zero(g2, g2);
    s.pairing[1] = to_rational(ZMatrix::from_rows({{0, 1}, {-1, 0}}));
    s.pairing[0] = to_rational(ZMatrix::from_rows({{3}}));
    auto path = write_temp("ih.json", serialize_slice(s));
    auto loaded = load_slice(path);
    REQUIRE(std::holds_alternative<IhSliceData>(loaded));
    const auto& t = std::get<IhSliceData>(loaded);
    REQUIRE(t.var.matrix == s.var.matrix);
    REQUIRE(t.pairing.at(1) == s.pairing.at(1));
    REQUIRE(serialize_slice(loaded) == serialize_slice(s));
  }
}
