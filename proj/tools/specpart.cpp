#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "specpart/errors.hpp"
#include "specpart/io.hpp"
#include "specpart/json_util.hpp"
#include "specpart/parallel.hpp"
#include "specpart/scenario.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw specpart::ValidationError("cannot read " + path);
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw specpart::ValidationError(path + ": " + e.what());
  }
}

// Plain numbers stay numbers in the config echo; anything else ("inf", "pi/16") stays a string.
json cli_value(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return s;
  if (std::abs(v) < 1e15 && v == std::floor(v)) return static_cast<long long>(v);
  return v;
}

// "--name value" and "--name=value" pairs left over after CLI11 parsing.
json extra_params(const std::vector<std::string>& rest) {
  json params = json::object();
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const std::string& a = rest[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) throw specpart::ValidationError("unexpected argument '" + a + "'");
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      params[a.substr(2, eq - 2)] = cli_value(a.substr(eq + 1));
    } else {
      if (i + 1 >= rest.size()) throw specpart::ValidationError("missing value for '" + a + "'");
      params[a.substr(2)] = cli_value(rest[++i]);
    }
  }
  return params;
}

std::vector<double> split_values(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(specpart::parse_scalar(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral minimal partitions of Schroedinger operators on grid domains"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.allow_extras();

  std::string config_path, out_dir, domain_path, k_opt, p_opt, axis, values, example_name;
  std::optional<std::uint64_t> seed;
  int nthreads = 1;
  std::optional<double> tol;
  app.add_option("--config", config_path, "JSON scenario file");
  app.add_option("--out", out_dir, "output directory for the report and artifacts");
  app.add_option("--seed", seed, "64-bit seed for every random choice");
  app.add_option("--threads", nthreads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "eigen-solver tolerance");

  std::vector<CLI::App*> verbs;
  for (const char* v : {"solve", "threshold", "persson", "ring", "ims"}) {
    auto* sub = app.add_subcommand(v, std::string("run the ") + v + " mode");
    sub->add_option("--domain", domain_path, "JSON file with a domain object or a full config");
    sub->add_option("--k", k_opt, "number of cells");
    sub->add_option("--p", p_opt, "energy exponent, a number >= 1 or inf");
    verbs.push_back(sub);
  }
  auto* ex = app.add_subcommand("example", "run a named example; extra --name value pairs set its parameters");
  ex->add_option("name", example_name, "strip | watermelon | halfstrip | stripball | nopotential | harmonic")->required();
  ex->allow_extras();
  auto* sw = app.add_subcommand("sweep", "repeat a scenario over one axis");
  sw->add_option("--axis", axis, "R | p | k | h")->required();
  sw->add_option("--values", values, "comma-separated values")->required();
  sw->add_option("--example", example_name, "sweep a named example instead of --config");
  sw->add_option("--domain", domain_path, "JSON file with a domain object or a full config");
  sw->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const fs::path out = out_dir;
  try {
    specpart::set_threads(nthreads);
    json config = config_path.empty() ? json::object() : load_json(config_path);
    if (!config.is_object()) throw specpart::ValidationError("config must be a JSON object");
    if (!domain_path.empty()) {
      json d = load_json(domain_path);
      if (d.contains("domain")) {
        for (auto& [key, v] : d.items()) config[key] = v;
      } else {
        config["domain"] = d;
      }
    }

    // without a verb the config's own mode runs
    CLI::App* verb = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    if (verb == &app && config_path.empty()) throw specpart::ValidationError("give a verb or --config");
    const std::string name = verb == &app ? config.value("mode", std::string("solve")) : verb->get_name();
    auto rest = verb == &app ? std::vector<std::string>() : verb->remaining();
    for (const auto& a : app.remaining()) rest.push_back(a);
    if (!rest.empty() && verb != ex && verb != sw && name != "example") {
      throw specpart::ValidationError("unexpected argument '" + rest.front() + "'");
    }
    const json extras = extra_params(rest);
    if (!example_name.empty()) {
      config["mode"] = "example";
      json e = config.contains("example") && config["example"].is_object() ? config["example"] : json::object();
      e["name"] = example_name;
      config["example"] = e;
    } else if (name != "sweep") {
      config["mode"] = name;
    }
    const bool example = config.value("mode", std::string()) == "example";
    json& target = example ? config["example"] : config;
    if (example && target.is_string()) target = json{{"name", target}};
    for (auto& [key, v] : extras.items()) target[key] = v;
    if (!k_opt.empty()) target["k"] = cli_value(k_opt);
    if (!p_opt.empty()) target["p"] = cli_value(p_opt);
    if (seed) {
      if (!config.contains("seed") || !config["seed"].is_object()) config["seed"] = json::object();
      config["seed"]["value"] = *seed;
    }
    if (tol) config["tolerances"]["eig"] = *tol;

    if (verb == sw) {
      const auto vals = split_values(values);
      const json rep = specpart::run_sweep(config, axis, vals, out);
      std::cout << specpart::sweep_csv(rep);
      return 0;
    }
    const json rep = specpart::run(specpart::parse_config(config), out);
    std::cout << (out.empty() ? rep : rep.at("summary")).dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    const json err = specpart::error_json(e);
    std::cerr << err.dump(2) << "\n";
    if (!out.empty()) {
      try {
        specpart::io::write_json(out / "error.json", err);
      } catch (const std::exception&) {
      }
    }
    return specpart::exit_status(e);
  }
}
