#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pseudochart/chartctl.hpp"

using namespace pseudochart;

namespace {

std::vector<int> parse_degrees(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::string summary(const RunConfig& cfg, const CommandResult& r) {
  const auto& d = r.document;
  if (d.contains("error")) return "error: " + d["error"]["message"].get<std::string>();
  if (cfg.subcommand == "obstruct") {
    std::string s = d["verdict"]["outcome"];
    if (d["verdict"].contains("reason")) s += "(" + d["verdict"]["reason"].get<std::string>() + ")";
    return s;
  }
  if (cfg.subcommand == "verify") return d["pass"].get<bool>() ? "PASS" : "FAIL";
  if (cfg.subcommand == "construct") return "wrote " + d["kind"].get<std::string>();
  return "erratum: " + std::to_string(d["rows"].size()) + " rows";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construct, verify and obstruct pseudo-charts"};
  app.require_subcommand(1);
  RunConfig cfg;
  bool as_json = false;
  std::string degrees = "0,2";
  bool n_given = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "random seed (recorded in the output)");
    sub->add_option("--out", cfg.out, "write the JSON document here");
    sub->add_flag("--json", as_json, "print the JSON document to stdout");
  };

  CLI::App* construct = app.add_subcommand("construct", "emit a chart or bundle atlas");
  construct->add_option("construction", cfg.construction, "p1 | p1n | p2 | pn | bundle")
      ->required()
      ->check(CLI::IsMember({"p1", "p1n", "p2", "pn", "bundle"}));
  construct->add_option("--n", cfg.n, "dimension");
  construct->add_option("--degrees", degrees, "bundle twists a0,...,ar");
  common(construct);

  CLI::App* verify = app.add_subcommand("verify", "run the verification suites on a chart file");
  verify->add_option("input", cfg.input, "chart or atlas JSON")->required();
  verify->add_option("--samples", cfg.samples, "random targets for degree and fiber scans");
  verify->add_option("--backend", cfg.backend, "auto | structured_exact | structured_numeric | brute | generic");
  verify->add_option("--p", cfg.p, "brute backend characteristic");
  verify->add_option("--k", cfg.k, "brute backend extension degree");
  common(verify);

  CLI::App* obstruct = app.add_subcommand("obstruct", "obstruction verdict for a curve complement or surface model");
  obstruct->add_option("--curve", cfg.curve, "plane curve: inline form or JSON file");
  obstruct->add_option("--surface", cfg.surface, "surface model JSON file or catalog preset");
  common(obstruct);

  CLI::App* erratum = app.add_subcommand("erratum", "stated versus measured chart degrees");
  erratum->add_option("--n", cfg.n, "largest n (1..3)")->each([&](const std::string&) { n_given = true; });
  erratum->add_option("--samples", cfg.samples, "random targets per degree estimate");
  common(erratum);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitBadInput;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  try {
    cfg.degrees = parse_degrees(degrees);
  } catch (const std::exception&) {
    std::cerr << "error: --degrees expects comma-separated integers\n";
    return kExitBadInput;
  }
  if (cfg.subcommand == "erratum" && !n_given) cfg.n = 3;
  if (const char* env = std::getenv("PSEUDOCHART_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*env == '\0' || *end != '\0' || v <= 0) {
      std::cerr << "error: PSEUDOCHART_THREADS must be a positive integer\n";
      return kExitBadInput;
    }
  }

  const CommandResult r = run(cfg);
  const std::string text = r.document.dump(2) + "\n";
  if (!cfg.out.empty()) {
    std::ofstream out(cfg.out);
    if (!out) {
      std::cerr << "error: cannot write " << cfg.out << "\n";
      return kExitBadInput;
    }
    out << text;
  }
  if (as_json || cfg.out.empty()) std::cout << text;
  if (r.document.contains("error")) {
    std::cerr << summary(cfg, r) << "\n";
  } else if (!as_json && !cfg.out.empty()) {
    std::cout << summary(cfg, r) << "\n";
  }
  return r.exit_code;
}
