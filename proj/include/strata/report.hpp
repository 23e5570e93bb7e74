#pragma once

#include "strata/checks.hpp"
#include "strata/slice_io.hpp"

#include <json.hpp>

#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace strata {

// A scenario names a slice source, the ambient dimension to stabilize to,
// the coefficient ring, an optional intersection-homology request, and a
// set of named checks from the fixed vocabulary.
struct Scenario {
  std::string name;
  std::string example;  // curve-germ | morse | smooth-base | "" for files
  std::vector<int> mults;
  int morse_m = 3;
  std::string slice_path;
  int ambient = -1;   // -1: use the slice's own ambient dimension
  std::string coeff;  // "", "Z" or "Q"; generators default to Z
  bool ih = false;
  int steps = 0;
  std::vector<std::string> checks;
};

inline const std::set<std::string>& check_vocabulary() {
  static const std::set<std::string> v{"prop2",    "prop3",    "prop4", "cor2",
                                       "cor4",     "thm6",     "thm7",  "thm8",
                                       "thm9",     "example1", "example2", "lemma5"};
  return v;
}

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct Report {
  std::string text;
  nlohmann::ordered_json json;
  bool checks_passed = true;
};

namespace report_detail {

using json = nlohmann::ordered_json;

inline bool color_enabled() {
  const char* v = std::getenv("STRATA_COLOR");
  return v != nullptr && std::string(v) == "1";
}

inline std::string verdict(bool pass) {
  if (color_enabled()) return pass ? "\x1b[32mPASS\x1b[0m" : "\x1b[31mFAIL\x1b[0m";
  return pass ? "PASS" : "FAIL";
}

inline std::string indent_block(const std::string& text, const std::string& pad) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) out << pad << line << "\n";
  return out.str();
}

template <class R>
void render_level(std::ostringstream& os, json& jlevels, const TowerLevel<R>& lvl) {
  os << "level " << lvl.r << "\n";
  json jl;
  jl["r"] = lvl.r;
  json jdegrees = json::array();
  for (int j : lvl.degrees()) {
    auto rg = lvl.rel_at(j), ag = lvl.abs_at(j);
    os << "  degree " << j << ": rel " << rg.to_string() << "  abs " << ag.to_string()
       << "\n";
    json jd;
    jd["degree"] = j;
    jd["rel"] = rg.to_string();
    jd["abs"] = ag.to_string();
    jd["rel_rank"] = rg.rank();
    jd["abs_rank"] = ag.rank();
    jdegrees.push_back(jd);
  }
  for (const auto& [j, h] : lvl.var) {
    if (h.matrix.rows() == 0 || h.matrix.cols() == 0) continue;
    os << "  var[" << j << "]:\n" << indent_block(h.matrix.to_string(), "    ");
  }
  for (const auto& [j, h] : lvl.jmap) {
    if (h.matrix.rows() == 0 || h.matrix.cols() == 0) continue;
    os << "  jmap[" << j << "]:\n" << indent_block(h.matrix.to_string(), "    ");
  }
  for (const auto& [j, ex] : lvl.extra) {
    if (ex.is_trivial()) continue;
    os << "  extra[" << j << "]: quotient " << ex.quotient_part.to_string() << ", kernel "
       << ex.kernel_part.to_string() << (ex.split ? " (split)" : " (extension unresolved)")
       << "\n";
  }
  jl["degrees"] = jdegrees;
  jlevels.push_back(jl);
}

inline void render_ih_level(std::ostringstream& os, json& jlevels, const IhTowerLevel& lvl) {
  os << "ih level " << (lvl.m + lvl.l) << " (l = " << lvl.l << ")\n";
  json jl;
  jl["l"] = lvl.l;
  json jdegrees = json::array();
  int lo = 0, hi = lvl.d + 2 * lvl.l + 2 * lvl.d + 1;
  for (int deg = lo; deg <= hi; ++deg) {
    auto ag = lvl.abs_group(deg);
    auto rg = lvl.rel_group(deg);
    if (ag.is_trivial() && rg.is_trivial()) continue;
    os << "  degree " << deg << ": rel " << rg.to_string() << "  abs " << ag.to_string()
       << "\n";
    json jd;
    jd["degree"] = deg;
    jd["rel_rank"] = rg.rank();
    jd["abs_rank"] = ag.rank();
    jdegrees.push_back(jd);
  }
  if (lvl.var_mid.matrix.rows() > 0)
    os << "  var[" << lvl.middle_degree() << "]:\n"
       << indent_block(lvl.var_mid.matrix.to_string(), "    ");
  if (lvl.jmap_mid.matrix.rows() > 0)
    os << "  jmap[" << lvl.middle_degree() << "]:\n"
       << indent_block(lvl.jmap_mid.matrix.to_string(), "    ");
  if (lvl.pairing_mid.rows() > 0)
    os << "  pairing[" << lvl.middle_degree() << "]:\n"
       << indent_block(lvl.pairing_mid.to_string(), "    ");
  jl["degrees"] = jdegrees;
  jlevels.push_back(jl);
}

inline void render_check(std::ostringstream& os, json& jchecks, const CheckResult& check,
                         bool& all_pass) {
  os << check.name << ":\n";
  json jc;
  jc["name"] = check.name;
  jc["not_applicable"] = check.not_applicable;
  json jlines = json::array();
  for (const auto& line : check.lines) {
    os << "  " << line.label << ": " << verdict(line.pass);
    if (!line.detail.empty()) os << "  [" << line.detail << "]";
    os << "\n";
    if (!line.pass) all_pass = false;
    json jline;
    jline["label"] = line.label;
    jline["pass"] = line.pass;
    jline["detail"] = line.detail;
    jlines.push_back(jline);
  }
  jc["lines"] = jlines;
  jc["pass"] = check.all_pass();
  jchecks.push_back(jc);
}

}  // namespace report_detail

// Checks that need the intersection tower.
inline CheckResult check_thm6(const IhSliceData& slice, const std::vector<IhTowerLevel>& levels) {
  CheckResult out;
  out.name = "thm6";
  auto orth = orthogonality_check(slice);
  out.add("ker var orthogonal to im var", orth.orthogonal,
          orth.orthogonal ? ""
                          : "witness kernel vector " + std::to_string(orth.kernel_index) +
                                " against generator " + std::to_string(orth.generator_index));
  bool transport_ok = true, low_ok = true, dual_ok = true, ker_ok = true;
  for (const auto& lvl : levels) {
    auto pit = slice.pairing.find(slice.d);
    QMatrix base = pit != slice.pairing.end()
                       ? pit->second
                       : QMatrix(slice.rel_at(slice.d).gens(), slice.abs_at(slice.d).gens());
    QMatrix closed = lvl.coset_reps.transposed() * base * lvl.image_vectors;
    closed = closed * Rat(ih_pairing_sign(slice.d, lvl.l));
    if (lvl.pairing_mid != closed) transport_ok = false;
    for (int i = 0; i < slice.d; ++i) {
      auto p = lvl.pairing_at(i);
      auto sp = slice.pairing.find(i);
      if (sp == slice.pairing.end()) continue;
      if (!p.has_value() || *p != sp->second) low_ok = false;
    }
    if (matrix_rank(lvl.pairing_mid) != lvl.rel_mid.rank()) dual_ok = false;
    if (matrix_rank(lvl.pairing_ker_coker) != lvl.rel_kernel.rank()) ker_ok = false;
  }
  out.add("step-by-step pairing transport matches the closed sign formula", transport_ok);
  out.add("pairings below the middle degree are carried verbatim", low_ok);
  out.add("transported middle pairing stays nondegenerate", dual_ok);
  out.add("kernel-cokernel pairing stays nondegenerate", ker_ok);
  return out;
}

inline CheckResult check_thm7(const std::vector<IhTowerLevel>& levels) {
  CheckResult out;
  out.name = "thm7";
  bool route_ok = true, iso_ok = true, kill_ok = true;
  for (const auto& lvl : levels) {
    if (!compose(lvl.var_mid, lvl.stab_op).equal_as_homs(lvl.infinity_op)) route_ok = false;
    if (matrix_rank(lvl.var_mid.matrix) != lvl.rel_mid.rank()) iso_ok = false;
    if (!(lvl.stab_op.matrix * lvl.kernel_vectors).is_zero()) kill_ok = false;
  }
  out.add("var maps stabilized classes to transported ones", route_ok);
  out.add("var is an isomorphism at every computed level", iso_ok);
  out.add("stab kills ker var", kill_ok);
  return out;
}

inline CheckResult check_thm8(const IhSliceData& slice, const std::vector<IhTowerLevel>& levels) {
  CheckResult out;
  out.name = "thm8";
  bool formula_ok = true, welldef_ok = true;
  QMatrix jv = slice.jmap.matrix * slice.var.matrix;
  for (const auto& lvl : levels) {
    QMatrix arg = (lvl.l % 2 == 1)
                      ? QMatrix(lvl.coset_reps * Rat(2) + jv * lvl.coset_reps)
                      : QMatrix(jv * lvl.coset_reps);
    QMatrix expect = lvl.stab_op.matrix * arg;
    if (lvl.l % 2 == 1) expect = -expect;
    if (lvl.jmap_mid.matrix != expect) formula_ok = false;
    if (!(lvl.jmap_mid.matrix * lvl.infinity_op.matrix * lvl.kernel_vectors).is_zero())
      welldef_ok = false;
  }
  out.add("relativization follows the parity formula", formula_ok);
  out.add("formula is independent of the representative", welldef_ok);
  return out;
}

inline CheckResult check_thm9(const RhoReport& rep) {
  CheckResult out;
  out.name = "thm9";
  if (!rep.applicable) {
    out.not_applicable = true;
    out.add("verdict", true, "not applicable: " + rep.reason);
    return out;
  }
  for (const auto& line : rep.lines) {
    std::string label = line.identity + " @ l=" + std::to_string(line.level);
    out.add(label, line.pass,
            line.pass ? "" : "first failing basis vector " + std::to_string(line.failing_basis));
  }
  return out;
}

// Build everything a scenario asks for and render the report.
inline Report run_scenario(const Scenario& sc) {
  namespace rd = report_detail;
  Report rep;
  std::ostringstream os;
  rd::json root;

  for (const auto& c : sc.checks)
    if (!check_vocabulary().count(c)) throw ScenarioError("unknown check '" + c + "'");
  if (!sc.coeff.empty() && sc.coeff != "Z" && sc.coeff != "Q")
    throw ScenarioError("coefficient ring must be Z or Q");

  // Resolve the slice source.
  std::optional<AnySlice> loaded;
  if (!sc.slice_path.empty()) {
    loaded = load_slice(sc.slice_path);
  } else if (sc.example == "curve-germ") {
    if (sc.mults.empty()) throw ScenarioError("curve-germ needs --mults");
    if (sc.ih)
      loaded = ih_curve_germ_slice(CurveGermSpec{sc.mults},
                                   sc.ambient > 0 ? sc.ambient : 2 + std::max(sc.steps, 1));
    else if (sc.coeff == "Q")
      loaded = curve_germ_slice<QRing>(CurveGermSpec{sc.mults});
    else
      loaded = curve_germ_slice<ZRing>(CurveGermSpec{sc.mults});
  } else if (sc.example == "morse") {
    if (sc.ih)
      loaded = ih_transverse_morse_slice(
          sc.morse_m, sc.ambient > 0 ? sc.ambient : sc.morse_m + std::max(sc.steps, 1));
    else if (sc.coeff == "Q")
      loaded = transverse_morse_slice<QRing>(sc.morse_m);
    else
      loaded = transverse_morse_slice<ZRing>(sc.morse_m);
  } else if (sc.example == "smooth-base") {
    if (sc.ih)
      loaded = ih_smooth_base_slice(sc.ambient > 0 ? sc.ambient : 1 + std::max(sc.steps, 1));
    else if (sc.coeff == "Q")
      loaded = smooth_pl_base_slice<QRing>();
    else
      loaded = smooth_pl_base_slice<ZRing>();
  } else {
    throw ScenarioError("no slice source: give --slice or --example");
  }

  os << "strata tower report\n";
  std::ostringstream src;
  if (!sc.slice_path.empty())
    src << "slice " << sc.slice_path;
  else {
    src << "example " << sc.example;
    if (sc.example == "curve-germ") {
      src << " mults ";
      for (std::size_t i = 0; i < sc.mults.size(); ++i)
        src << (i ? "," : "") << sc.mults[i];
    }
    if (sc.example == "morse") src << " m " << sc.morse_m;
  }
  root["scenario"]["source"] = src.str();
  root["scenario"]["coeff"] = sc.coeff.empty() ? "Z" : sc.coeff;
  root["scenario"]["ih"] = sc.ih;

  std::vector<std::string> assumptions;
  assumptions.push_back(
      "relativization sign: jmap(shift a) = -embed(2a + var(jmap(a))), with the "
      "quotient-part correction class subtracted over Z at the base step; the transport "
      "orientation is normalized to make the parity laws hold");

  bool all_pass = true;
  rd::json jchecks = rd::json::array();

  auto want = [&sc](const char* name) {
    for (const auto& c : sc.checks)
      if (c == name) return true;
    return false;
  };

  if (std::holds_alternative<IhSliceData>(*loaded)) {
    const auto& slice = std::get<IhSliceData>(*loaded);
    auto verdict = validate_slice(slice);
    if (!verdict.ok()) {
      std::ostringstream msg;
      msg << "slice validation failed:";
      for (const auto& v : verdict.violations)
        msg << " [" << v.rule << " at degree " << v.degree << " (" << v.group << "): "
            << v.detail << "]";
      throw ScenarioError(msg.str());
    }
    int steps = sc.steps > 0 ? sc.steps : slice.k;
    if (steps > slice.k)
      throw ScenarioError("requested " + std::to_string(steps) +
                          " steps but the slice supports k = " + std::to_string(slice.k));
    os << "source: " << src.str() << "\n";
    os << "intersection homology over Q: m = " << slice.m << ", d = " << slice.d
       << ", k = " << slice.k << ", steps = " << steps << "\n\n";
    auto levels = ih_tower(slice, steps);
    rd::json jlevels = rd::json::array();
    for (const auto& lvl : levels) rd::render_ih_level(os, jlevels, lvl);
    root["ih_levels"] = jlevels;

    os << "\nchecks\n";
    if (want("thm6")) rd::render_check(os, jchecks, check_thm6(slice, levels), all_pass);
    if (want("thm7")) rd::render_check(os, jchecks, check_thm7(levels), all_pass);
    if (want("thm8")) rd::render_check(os, jchecks, check_thm8(slice, levels), all_pass);
    if (want("prop2")) {
      CheckResult pr;
      pr.name = "prop2";
      bool ok = true;
      for (const auto& lvl : levels)
        for (int i = slice.d + 1; i <= slice.d + lvl.l - 1; ++i)
          if (!lvl.abs_group(i).is_trivial()) ok = false;
      pr.add("vanishing windows hold at every level", ok);
      rd::render_check(os, jchecks, pr, all_pass);
    }
    if (want("thm9")) {
      if (sc.example.empty())
        throw ScenarioError("thm9 needs a built-in example to pair both towers");
      Tower<QRing> ord = [&] {
        if (sc.example == "curve-germ")
          return build_tower(curve_germ_slice<QRing>(CurveGermSpec{sc.mults}),
                             slice.m + steps);
        if (sc.example == "morse")
          return build_tower(transverse_morse_slice<QRing>(sc.morse_m), slice.m + steps);
        return build_tower(smooth_pl_base_slice<QRing>(), slice.m + steps);
      }();
      auto id = GroupHom<QRing>::identity(slice.rel_at(slice.d));
      rd::render_check(os, jchecks, check_thm9(rho_compatibility(ord, levels, id, id)),
                       all_pass);
    }
    for (const char* name : {"prop3", "prop4", "cor2", "cor4", "example1", "example2",
                             "lemma5"})
      if (want(name))
        throw ScenarioError(std::string("check '") + name +
                            "' applies to ordinary-homology scenarios");
  } else {
    auto run_ordinary = [&](auto slice) {
      using R = typename decltype(slice.rel)::mapped_type::Ring;
      auto verdict = validate_slice(slice);
      if (!verdict.ok()) {
        std::ostringstream msg;
        msg << "slice validation failed:";
        for (const auto& v : verdict.violations)
          msg << " [" << v.rule << " at degree " << v.degree << " (" << v.group << "): "
              << v.detail << "]";
        throw ScenarioError(msg.str());
      }
      int ambient = sc.ambient > 0 ? sc.ambient : slice.n;
      if (ambient < slice.m)
        throw ScenarioError("ambient dimension " + std::to_string(ambient) +
                            " is below the slice level " + std::to_string(slice.m));
      os << "source: " << src.str() << "\n";
      os << "ordinary homology over " << R::name() << ": m = " << slice.m
         << ", d = " << slice.d << ", ambient = " << ambient << "\n\n";
      auto tower = build_tower(slice, ambient);
      rd::json jlevels = rd::json::array();
      for (const auto& lvl : tower.levels) rd::render_level(os, jlevels, lvl);
      root["levels"] = jlevels;
      for (const auto& lvl : tower.levels)
        for (const auto& [j, ex] : lvl.extra)
          if (!ex.split)
            assumptions.push_back(
                "unresolved Z-extension at level " + std::to_string(lvl.r) + " degree " +
                std::to_string(j) + ": torsion bounded by the split presentation " +
                lvl.rel_at(j).to_string());

      os << "\nchecks\n";
      if (want("prop2")) rd::render_check(os, jchecks, check_prop2(tower), all_pass);
      if (want("prop3")) rd::render_check(os, jchecks, check_prop3(tower), all_pass);
      if (want("cor2")) rd::render_check(os, jchecks, check_cor2(tower), all_pass);
      if (want("cor4"))
        rd::render_check(os, jchecks, periodicity_check(tower).to_check(), all_pass);
      if (want("lemma5")) rd::render_check(os, jchecks, check_lemma5(slice), all_pass);
      if (want("prop4")) {
        if (sc.example != "curve-germ" || sc.mults.size() != 1)
          throw ScenarioError("prop4 needs an irreducible curve-germ example");
        auto p4 = proposition4_report(sc.mults[0], ambient);
        rd::render_check(os, jchecks, p4.checks, all_pass);
        assumptions.push_back(
            "iterated-variation counts for the parity laws: nu-fold (even ambient), "
            "2nu-fold (odd ambient, odd multiplicity); for even multiplicity the nu-fold "
            "iterate doubles the alternating class");
      }
      if (want("example1")) {
        if (sc.example != "curve-germ")
          throw ScenarioError("example1 needs a curve-germ example");
        rd::render_check(os, jchecks, check_example1(CurveGermSpec{sc.mults}), all_pass);
      }
      if (want("example2")) {
        if (sc.example != "morse") throw ScenarioError("example2 needs a morse example");
        rd::render_check(os, jchecks, check_example2(sc.morse_m), all_pass);
      }
      for (const char* name : {"thm6", "thm7", "thm8", "thm9"})
        if (want(name))
          throw ScenarioError(std::string("check '") + name +
                              "' needs an intersection-homology scenario (--ih)");
      if (sc.example == "morse" && sc.morse_m % 2 == 0)
        assumptions.push_back(
            "even-dimensional Morse slice: relativization set to -2 by the two-point "
            "convention (variation is trivial either way)");
    };
    if (std::holds_alternative<SliceData<ZRing>>(*loaded)) {
      if (sc.coeff == "Q" && !sc.slice_path.empty())
        throw ScenarioError("file carries coeff Z but the scenario requests Q");
      run_ordinary(std::get<SliceData<ZRing>>(*loaded));
    } else {
      if (sc.coeff == "Z" && !sc.slice_path.empty())
        throw ScenarioError("file carries coeff Q but the scenario requests Z");
      run_ordinary(std::get<SliceData<QRing>>(*loaded));
    }
  }

  os << "\nassumptions\n";
  rd::json jassume = rd::json::array();
  for (const auto& a : assumptions) {
    os << "  - " << a << "\n";
    jassume.push_back(a);
  }
  root["assumptions"] = jassume;
  root["checks"] = jchecks;
  root["pass"] = all_pass;

  os << "\nsummary: " << rd::verdict(all_pass) << "\n";
  rep.text = os.str();
  rep.json = root;
  rep.checks_passed = all_pass;
  return rep;
}

}  // namespace strata
