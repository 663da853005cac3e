// Command-line front end: lilklucb <simulate|replay|identify|table1|coverage> [options]

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lilklucb/experiments.hpp"

namespace {

using lilklucb::Command;

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Subcommand {
  Command command;
  const char* name;
  const char* help;
  std::vector<std::string> options;
};

const std::vector<Subcommand>& subcommands() {
  static const std::vector<Subcommand> subs{
      {Command::simulate, "simulate", "UCB membership curves on the parametric family",
       {"scheme", "bound-n", "delta", "n", "alpha", "budget", "reps", "k", "seed", "snapshot-every",
        "output", "format", "parallel"}},
      {Command::replay, "replay", "UCB membership curves on bootstrapped contest votes",
       {"scheme", "bound-n", "delta", "budget", "reps", "k", "seed", "snapshot-every", "input",
        "columns", "star-map", "output", "format", "parallel"}},
      {Command::identify, "identify", "lil-KLUCB runs against the predicted sample complexity",
       {"scheme", "bound-n", "delta", "n", "alpha", "mus", "budget", "reps", "seed", "input",
        "columns", "star-map", "grid-points", "output", "format", "parallel"}},
      {Command::table1, "table1", "hardness sums and their growth in n", {"n", "alpha", "output", "format"}},
      {Command::coverage, "coverage", "anytime violation rates of the confidence sequences",
       {"scheme", "bound-n", "delta", "mus", "budget", "reps", "seed", "output", "format", "parallel"}},
  };
  return subs;
}

const std::map<std::string, std::string>& option_help() {
  static const std::map<std::string, std::string> help{
      {"scheme", "confidence schemes, comma-separated: kl, kl-prime, sg1, sg2"},
      {"bound-n", "tilt parameter N of the KL bounds (power of two, default 8)"},
      {"delta", "confidence level (default 0.01)"},
      {"n", "number of arms (table1: comma-separated list)"},
      {"alpha", "gap exponent (table1: comma-separated list)"},
      {"mus", "explicit arm means, comma-separated"},
      {"budget", "sample budget (coverage: trajectory length)"},
      {"reps", "repetitions (coverage: trajectories), default 250"},
      {"k", "top-k size for membership curves (default 5)"},
      {"seed", "base seed (falls back to LILKLUCB_SEED, then 0)"},
      {"snapshot-every", "samples between curve points (default 2n)"},
      {"grid-points", "grid size of the complexity minimization (default 64)"},
      {"input", "contest vote CSV"},
      {"columns", "caption,one_star,two_star,three_star column names"},
      {"star-map", "rewards of 1,2,3-star votes (default 0,0.5,1)"},
      {"output", "output path (stdout if omitted)"},
      {"format", "csv or json (default csv)"},
      {"parallel", "worker threads (default 1)"},
  };
  return help;
}

std::string json_to_option(const std::string& key, const nlohmann::json& v) {
  auto scalar = [&](const nlohmann::json& x) -> std::string {
    if (x.is_string()) return x.get<std::string>();
    if (x.is_number()) return x.dump();
    throw lilklucb::ConfigError("config key '" + key + "': expected a string, number or list");
  };
  if (!v.is_array()) return scalar(v);
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += scalar(v[i]);
  }
  return out;
}

void apply_config_file(const std::string& path, const Subcommand& sub,
                       std::map<std::string, std::string>& values) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw lilklucb::ConfigError("config file " + path + " is not valid JSON");
  }
  if (!doc.is_object()) throw lilklucb::ConfigError("config file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(sub.options.begin(), sub.options.end(), key) == sub.options.end()) {
      throw lilklucb::ConfigError("config key '" + key + "' is not an option of " + sub.name);
    }
    values[key] = json_to_option(key, value);
  }
}

std::string output_path(const std::string& base, const std::string& tag, bool several) {
  if (!several || tag.empty()) return base;
  const std::filesystem::path p(base);
  return (p.parent_path() / (p.stem().string() + "_" + tag + p.extension().string())).string();
}

int run(const Subcommand& sub, std::map<std::string, std::string> values, const std::string& config) {
  if (!config.empty()) apply_config_file(config, sub, values);
  if (!values.contains("seed")) {
    if (const char* env = std::getenv("LILKLUCB_SEED")) values["seed"] = env;
  }
  const lilklucb::RunConfig cfg = lilklucb::config_from_options(sub.command, values);
  const auto outputs = lilklucb::run_command(cfg);
  const bool several = outputs.size() > 1;
  for (const auto& out : outputs) {
    if (cfg.output.empty()) {
      std::cout << lilklucb::format_output(out.table, cfg.format);
    } else {
      lilklucb::write_output(out.table, output_path(cfg.output, out.tag, several), cfg.format);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best-arm identification with lil-KLUCB and anytime KL confidence sequences"};
  app.require_subcommand(1);

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, std::vector<CLI::Option*>> registered;
  for (const auto& sub : subcommands()) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    for (const auto& name : sub.options) {
      registered[sub.name].push_back(
          cmd->add_option("--" + name, raw[sub.name][name], option_help().at(name)));
    }
    cmd->add_option("--config", config_paths[sub.name], "JSON file whose keys override the flags");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  for (const auto& sub : subcommands()) {
    if (!app.got_subcommand(sub.name)) continue;
    std::map<std::string, std::string> values;
    for (std::size_t i = 0; i < sub.options.size(); ++i) {
      if (registered[sub.name][i]->count() > 0) values[sub.options[i]] = raw[sub.name][sub.options[i]];
    }
    try {
      return run(sub, values, config_paths[sub.name]);
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    } catch (const lilklucb::OutputError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitIo;
    } catch (const lilklucb::IngestError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return e.kind() == lilklucb::IngestError::Kind::io ? kExitIo : kExitConfig;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  return kExitConfig;
}
