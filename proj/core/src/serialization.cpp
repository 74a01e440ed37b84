#include "bsq/serialization.hpp"

#include <sstream>

namespace bsq {

using nlohmann::json;

json to_json(const EnergyRecord& r) {
  return json{{"t", r.t},
              {"lp_p", r.lp_p},
              {"dissipation", r.dissipation},
              {"weighted", r.weighted},
              {"component_lp", r.component_lp}};
}

EnergyRecord energy_record_from_json(const json& j) {
  EnergyRecord r;
  r.t = j.at("t").get<double>();
  r.lp_p = j.at("lp_p").get<double>();
  r.dissipation = j.at("dissipation").get<double>();
  r.weighted = j.at("weighted").get<double>();
  r.component_lp = j.at("component_lp").get<std::array<double, 4>>();
  return r;
}

json to_json(const StopInfo& s) {
  return json{{"t", s.t}, {"level", s.level}, {"norm", s.norm}, {"reason", s.reason}};
}

json to_json(const AssumptionReport& r) {
  return json{{"n_b0", r.n_b[0]},
              {"n_b1", r.n_b[1]},
              {"n_b2", r.n_b[2]},
              {"nu", r.nu},
              {"p", r.p},
              {"c_bdg", r.c_bdg},
              {"threshold_local", r.threshold_local},
              {"pass_local", r.pass_local},
              {"pass_global", r.pass_global},
              {"parabolic_ok", r.parabolic_ok},
              {"solenoidal_ok", r.solenoidal_ok},
              {"eps0", r.eps0},
              {"sigma_kind", to_string(r.sigma_kind)},
              {"sigma_growth", r.sigma.growth},
              {"sigma_lipschitz", r.sigma.lipschitz},
              {"smallness", {{"nb2", r.smallness.nb2}, {"eps0", r.smallness.eps0}}},
              {"divergence", r.divergence},
              {"failures", r.failures}};
}

json to_json(const IterationTrace& t) {
  json it = json::array();
  for (const auto& s : t.iterates) {
    it.push_back({{"sup_lp_p", s.sup_lp_p}, {"terminal_lp_p", s.terminal_lp_p}});
  }
  return json{{"iterates", it},
              {"diffs", t.diffs},
              {"diff_norms", t.diff_norms},
              {"ratios", t.ratios},
              {"converged", t.converged},
              {"horizon", t.horizon}};
}

json to_json(const MaximalityReport& r) {
  json lv = json::array();
  for (const auto& l : r.levels) {
    lv.push_back({{"level", l.level}, {"tau", l.tau}, {"triggered", l.triggered}});
  }
  return json{{"levels", lv},
              {"tau_estimate", r.tau_estimate},
              {"monotone", r.monotone},
              {"consistency", r.consistency},
              {"max_deviation", r.max_deviation}};
}

json to_json(const PathResult& r) {
  json j{{"index", r.index},
         {"seed", r.seed},
         {"ok", r.ok},
         {"initial_lp_p", r.initial_lp_p},
         {"sup_weighted", r.sup_weighted},
         {"integral_weighted_dissipation", r.integral_weighted_dissipation},
         {"sup_norm", r.sup_norm},
         {"crossed", r.crossed},
         {"survived", r.survived},
         {"stopped", r.stopped ? to_json(*r.stopped) : json(nullptr)},
         {"extra", r.extra}};
  if (!r.ok) j["error"] = r.error;
  return j;
}

json to_json(const EnsembleSummary& s, bool include_paths) {
  json j{{"experiment", to_string(s.experiment)},
         {"n_paths", s.n_paths},
         {"n_failed", s.n_failed},
         {"delta0", s.delta0},
         {"mean_sup_weighted", s.mean_sup_weighted},
         {"se_sup_weighted", s.se_sup_weighted},
         {"mean_integral_dissipation", s.mean_integral_dissipation},
         {"mean_initial_lp_p", s.mean_initial_lp_p},
         {"c_fit", s.c_fit},
         {"crossing_fraction", s.crossing_fraction},
         {"survival_fraction", s.survival_fraction},
         {"fatal", s.fatal}};
  if (include_paths) {
    json paths = json::array();
    for (const auto& p : s.paths) paths.push_back(to_json(p));
    j["paths"] = std::move(paths);
  }
  return j;
}

json to_json(const MarkovCheck& m) {
  return json{{"bound", m.bound},
              {"empirical_survival", m.empirical_survival},
              {"binomial_se", m.binomial_se}};
}

std::string to_ndjson(std::span<const EnergyRecord> records) {
  std::ostringstream out;
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  return out.str();
}

}  // namespace bsq
