// Command-line front end: scenario ingestion, tower construction,
// verification suites, and deterministic report emission.

#include "strata/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using strata::Scenario;

std::vector<int> parse_mults(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  return out;
}

std::vector<std::string> parse_checks(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& entry : raw) {
    std::stringstream ss(entry);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(item);
  }
  return out;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw strata::ScenarioError(path + ": cannot open for writing");
  f << bytes;
}

int run_tower(const Scenario& sc, const std::string& json_path, const std::string& out_path) {
  strata::Report rep = strata::run_scenario(sc);
  std::cout << rep.text;
  if (!out_path.empty()) write_file(out_path, rep.text);
  if (!json_path.empty()) write_file(json_path, rep.json.dump(2) + "\n");
  return rep.checks_passed ? 0 : 1;
}

int run_verify(const std::string& batch_path) {
  std::ifstream f(batch_path, std::ios::binary);
  if (!f) {
    std::cerr << "error: " << batch_path << ": cannot open file\n";
    return 2;
  }
  nlohmann::ordered_json root;
  try {
    root = nlohmann::ordered_json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "error: " << batch_path << ": " << e.what() << "\n";
    return 2;
  }
  if (!root.is_object() || root.value("schema", "") != "strata-batch/1") {
    std::cerr << "error: " << batch_path << ": expected schema strata-batch/1\n";
    return 2;
  }
  std::size_t passed = 0, failed = 0, errors = 0;
  const auto scenarios = root.value("scenarios", nlohmann::ordered_json::array());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& js = scenarios[i];
    Scenario sc;
    sc.name = js.value("name", "scenario-" + std::to_string(i + 1));
    sc.example = js.value("example", "");
    if (js.contains("mults"))
      for (const auto& v : js.at("mults")) sc.mults.push_back(v.get<int>());
    sc.morse_m = js.value("m", 3);
    sc.slice_path = js.value("slice", "");
    sc.ambient = js.value("ambient", -1);
    sc.coeff = js.value("coeff", "");
    sc.ih = js.value("ih", false);
    sc.steps = js.value("steps", 0);
    if (js.contains("checks"))
      for (const auto& v : js.at("checks")) sc.checks.push_back(v.get<std::string>());
    try {
      strata::Report rep = strata::run_scenario(sc);
      if (rep.checks_passed) {
        ++passed;
        std::cout << sc.name << ": PASS\n";
      } else {
        ++failed;
        std::cout << sc.name << ": FAIL\n";
        std::istringstream lines(rep.text);
        std::string line;
        while (std::getline(lines, line))
          if (line.find(": FAIL") != std::string::npos) std::cout << "  " << line << "\n";
      }
    } catch (const std::exception& e) {
      ++errors;
      std::cout << sc.name << ": ERROR (" << e.what() << ")\n";
    }
  }
  std::cout << scenarios.size() << " scenarios, " << passed << " passed, " << failed
            << " failed, " << errors << " errors\n";
  return (failed || errors) ? 1 : 0;
}

int run_emit(const std::string& name, const std::vector<int>& mults, int morse_m, bool ih,
             int ambient, const std::string& out_path) {
  strata::AnySlice slice = [&]() -> strata::AnySlice {
    if (name == "curve-germ") {
      strata::CurveGermSpec spec{mults.empty() ? std::vector<int>{2} : mults};
      if (ih) return strata::ih_curve_germ_slice(spec, ambient > 0 ? ambient : 4);
      return strata::curve_germ_slice<strata::ZRing>(spec);
    }
    if (name == "morse") {
      if (ih)
        return strata::ih_transverse_morse_slice(morse_m,
                                                 ambient > 0 ? ambient : morse_m + 2);
      return strata::transverse_morse_slice<strata::ZRing>(morse_m);
    }
    if (name == "smooth-base") {
      if (ih) return strata::ih_smooth_base_slice(ambient > 0 ? ambient : 4);
      return strata::smooth_pl_base_slice<strata::ZRing>();
    }
    throw strata::ScenarioError("unknown example '" + name +
                                "' (known: curve-germ, morse, smooth-base)");
  }();
  std::string text = strata::serialize_slice(slice);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stabilization towers of variation and monodromy operators"};
  app.require_subcommand(1);

  Scenario sc;
  std::string mults_text, json_path, out_path;
  std::vector<std::string> check_args;

  auto* tower = app.add_subcommand("tower", "build a tower and run the requested checks");
  tower->add_option("--slice", sc.slice_path, "slice scenario file (strata-slice/1 JSON)");
  tower->add_option("--example", sc.example, "built-in slice: curve-germ | morse | smooth-base");
  tower->add_option("--mults", mults_text, "curve-germ branch multiplicities, e.g. 2,1");
  tower->add_option("--m", sc.morse_m, "slice dimension for the morse example");
  tower->add_option("--ambient", sc.ambient, "ambient dimension to stabilize to");
  tower->add_option("--coeff", sc.coeff, "coefficient ring: Z | Q");
  tower->add_flag("--ih", sc.ih, "use intersection homology");
  tower->add_option("--steps", sc.steps, "number of stabilization steps (with --ih)");
  tower->add_option("--check", check_args, "checks to run (comma separated, repeatable)");
  tower->add_option("--json", json_path, "write a machine-readable sidecar");
  tower->add_option("--out", out_path, "also write the text report to this path");

  std::string batch_path;
  auto* verify = app.add_subcommand("verify", "run a batch of scenarios");
  verify->add_option("batch", batch_path, "batch file (strata-batch/1 JSON)")->required();

  std::string emit_name;
  auto* emit = app.add_subcommand("emit-example", "write a built-in slice as a scenario file");
  emit->add_option("name", emit_name, "curve-germ | morse | smooth-base")->required();
  emit->add_option("--mults", mults_text, "curve-germ branch multiplicities");
  emit->add_option("--m", sc.morse_m, "slice dimension for the morse example");
  emit->add_flag("--ih", sc.ih, "emit the intersection-homology variant");
  emit->add_option("--ambient", sc.ambient, "ambient dimension (fixes k for --ih)");
  emit->add_option("--out", out_path, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    sc.mults = parse_mults(mults_text);
    sc.checks = parse_checks(check_args);
    if (tower->parsed()) return run_tower(sc, json_path, out_path);
    if (verify->parsed()) return run_verify(batch_path);
    if (emit->parsed())
      return run_emit(emit_name, sc.mults, sc.morse_m, sc.ih, sc.ambient, out_path);
  } catch (const strata::SliceFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const strata::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
