// bsq: batch driver for the stochastic Boussinesq harness.
//
//   bsq run <config.json>
//   bsq validate <config.json>
//   bsq sweep <config.json> --param noise.sigma.eps0 --values 0.005,0.01,0.02
//
// Exit codes: 0 ok, 1 malformed config, 2 assumption gate failure,
// 3 more than 10% of paths failed, 4 unexpected runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsq/allocator.hpp"
#include "bsq/checkpoint.hpp"
#include "bsq/config.hpp"
#include "bsq/ensemble.hpp"
#include "bsq/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int { ok = 0, bad_config = 1, gate = 2, path_failures = 3, internal = 4 };

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string summary_table(const bsq::ExperimentConfig& cfg, const bsq::EnsembleSummary& s,
                          const bsq::MarkovCheck& m, const std::string& hash) {
  std::ostringstream out;
  out << std::setprecision(6);
  out << "experiment                 " << bsq::to_string(s.experiment) << "\n"
      << "config hash                " << hash << "\n"
      << "grid                       " << cfg.grid_n << "^3\n"
      << "p, a, delta0               " << cfg.p << ", " << cfg.a << ", " << cfg.delta0 << "\n"
      << "dt, t_final                " << cfg.step.dt << ", " << cfg.step.t_final << "\n"
      << "paths (failed)             " << s.n_paths << " (" << s.n_failed << ")\n"
      << "mean initial ||U||_p^p     " << s.mean_initial_lp_p << "\n"
      << "mean sup weighted energy   " << s.mean_sup_weighted << " +/- " << s.se_sup_weighted
      << "\n"
      << "mean weighted dissipation  " << s.mean_integral_dissipation << "\n"
      << "C_fit                      " << s.c_fit << "\n"
      << "crossing fraction          " << s.crossing_fraction << "\n"
      << "survival fraction          " << s.survival_fraction << "\n"
      << "markov bound               " << m.bound << " (binomial se " << m.binomial_se << ")\n";
  out << "\n  path        seed  ok   sup_weighted      sup_norm  crossed\n";
  for (const auto& p : s.paths) {
    out << std::setw(6) << p.index << std::setw(12) << p.seed << std::setw(4)
        << (p.ok ? "y" : "n") << std::setw(15) << p.sup_weighted << std::setw(14) << p.sup_norm
        << std::setw(9) << (p.crossed ? "y" : "n");
    if (!p.ok) out << "  " << p.error;
    out << "\n";
  }
  return out.str();
}

struct RunOutcome {
  int code = ok;
  fs::path dir;
  bsq::EnsembleSummary summary;
  bsq::MarkovCheck markov;
};

RunOutcome execute(const bsq::ExperimentConfig& cfg) {
  RunOutcome r;
  const std::string hash = bsq::config_hash_hex(cfg);
  r.dir = fs::path(cfg.output_dir) / ("run_" + hash);
  fs::create_directories(r.dir / "paths");

  bsq::PreparedRun prep = bsq::prepare(cfg);
  write_json(r.dir / "assumption_report.json", bsq::to_json(prep.report));
  if (!prep.gate_failures.empty()) {
    for (const auto& f : prep.gate_failures) std::cerr << "assumption check failed: " << f << "\n";
    r.code = gate;
    return r;
  }

  r.summary = bsq::run_ensemble(prep.ensemble);
  r.markov = bsq::markov_bound(r.summary, cfg.delta0);

  for (const auto& p : r.summary.paths) {
    char name[32];
    std::snprintf(name, sizeof name, "path_%04zu", p.index);
    write_text(r.dir / "paths" / (std::string(name) + ".ndjson"), bsq::to_ndjson(p.energies));
    if (cfg.checkpoints && p.ok) {
      const double t = p.energies.empty() ? 0.0 : p.energies.back().t;
      bsq::save_checkpoint(r.dir / "paths" / (std::string(name) + ".bsq"),
                           bsq::make_checkpoint(p.final_state, t, p.seed));
    }
  }
  json summary{{"config", bsq::to_json(cfg)},
               {"config_hash", hash},
               {"summary", bsq::to_json(r.summary)},
               {"markov", bsq::to_json(r.markov)}};
  write_json(r.dir / "summary.json", summary);
  write_text(r.dir / "summary.txt", summary_table(cfg, r.summary, r.markov, hash));

  if (r.summary.fatal) {
    std::cerr << r.summary.n_failed << " of " << r.summary.n_paths
              << " paths failed (more than 10%)\n";
    r.code = path_failures;
  }
  return r;
}

void report_config_error(const bsq::ConfigError& e) {
  std::cerr << "config error: " << e.what() << "\n";
}

int cmd_run(const std::string& path) {
  const auto cfg = bsq::load_config(path);
  const auto r = execute(cfg);
  if (r.code == ok || r.code == path_failures) std::cout << r.dir.string() << "\n";
  return r.code;
}

int cmd_validate(const std::string& path) {
  const auto cfg = bsq::load_config(path);
  const auto prep = bsq::prepare(cfg);
  fs::create_directories(cfg.output_dir);
  write_json(fs::path(cfg.output_dir) / "assumption_report.json", bsq::to_json(prep.report));
  std::cout << bsq::to_json(prep.report).dump(2) << "\n";
  for (const auto& f : prep.gate_failures) std::cerr << "assumption check failed: " << f << "\n";
  return prep.gate_failures.empty() ? ok : gate;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& values) {
  const json base = bsq::parse_config_document(bsq::read_config_text(path));
  const auto base_cfg = bsq::config_from_json(base);
  const auto list = split(values, ',');
  if (list.empty()) throw bsq::ConfigError("--values must list at least one value", "--values");

  std::string pointer;
  for (const auto& part : split(param, '.')) pointer += "/" + part;
  const json::json_pointer ptr(pointer);

  std::vector<bsq::ExperimentConfig> cfgs;
  for (std::size_t i = 0; i < list.size(); ++i) {
    json doc = base;
    doc[ptr] = parse_value(list[i]);
    doc["output_dir"] = (fs::path(base_cfg.output_dir) / ("sweep_" + std::to_string(i))).string();
    cfgs.push_back(bsq::config_from_json(doc));
  }

  std::ostringstream csv;
  csv << std::setprecision(17);
  csv << "param,value,exit_code,run_dir,n_paths,n_failed,mean_sup_weighted,se_sup_weighted,"
         "c_fit,crossing_fraction,survival_fraction,markov_bound\n";
  int worst = ok;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    const auto r = execute(cfgs[i]);
    worst = std::max(worst, r.code);
    csv << param << "," << list[i] << "," << r.code << "," << r.dir.string() << ",";
    if (r.code == gate) {
      csv << ",,,,,,,\n";
      continue;
    }
    const auto& s = r.summary;
    csv << s.n_paths << "," << s.n_failed << "," << s.mean_sup_weighted << ","
        << s.se_sup_weighted << "," << s.c_fit << "," << s.crossing_fraction << ","
        << s.survival_fraction << "," << r.markov.bound << "\n";
  }
  fs::create_directories(base_cfg.output_dir);
  const fs::path out = fs::path(base_cfg.output_dir) / "sweep.csv";
  write_text(out, csv.str());
  std::cout << out.string() << "\n";
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  bsq::tune_allocator();
  CLI::App app{"Pseudo-spectral stochastic Boussinesq simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string param;
  std::string values;

  auto* run = app.add_subcommand("run", "Check assumptions, run the ensemble and write reports");
  run->add_option("config", config, "Experiment config (JSON)")->required();
  auto* validate = app.add_subcommand("validate", "Check assumptions only");
  validate->add_option("config", config, "Experiment config (JSON)")->required();
  auto* sweep = app.add_subcommand("sweep", "Run one config per value of a parameter");
  sweep->add_option("config", config, "Experiment config (JSON)")->required();
  sweep->add_option("--param", param, "Dotted config path, e.g. noise.sigma.eps0")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : bad_config;
  }

  try {
    if (*run) return cmd_run(config);
    if (*validate) return cmd_validate(config);
    return cmd_sweep(config, param, values);
  } catch (const bsq::ConfigError& e) {
    report_config_error(e);
    return bad_config;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bad_config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return internal;
  }
}
