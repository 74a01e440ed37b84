#include "bsq/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "bsq/diagnostics.hpp"
#include "bsq/operators.hpp"

namespace bsq {

using nlohmann::json;

ConfigError::ConfigError(const std::string& what, std::string field, int line, int column)
    : Error(what), field_(std::move(field)), line_(line), column_(column) {}

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& field, const std::string& msg) {
    throw ConfigError(field + ": " + msg, field);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number()) fail(join(path_, key), "expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) fail(join(path_, key), "expected an integer");
    return v.get<std::int64_t>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(join(path_, key), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) fail(join(path_, key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) fail(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  const json* child(const std::string& key) {
    if (!has(key)) return nullptr;
    return &obj_.at(key);
  }

  [[nodiscard]] std::string path(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!seen_.contains(key)) fail(join(path_, key), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) Reader::fail(field, msg);
}

std::array<int, 3> int3(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) Reader::fail(field, "expected an array of 3 integers");
  std::array<int, 3> out{};
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number_integer()) Reader::fail(field, "expected an array of 3 integers");
    out[i] = v[i].get<int>();
  }
  return out;
}

std::array<double, 3> real3(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 3) Reader::fail(field, "expected an array of 3 numbers");
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) Reader::fail(field, "expected an array of 3 numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

void read_transport(const json& doc, const std::string& path, TransportSpec& t) {
  Reader r(doc, path);
  const std::string kind = r.string("kind", "none");
  if (kind == "none") {
    t.kind = TransportKind::none;
  } else if (kind == "random") {
    t.kind = TransportKind::random;
  } else if (kind == "explicit") {
    t.kind = TransportKind::explicit_modes;
  } else {
    Reader::fail(r.path("kind"), "expected none, random or explicit");
  }
  t.seed = r.seed("seed", t.seed);
  t.max_wavenumber = static_cast<int>(r.integer("max_wavenumber", t.max_wavenumber));
  t.scale = r.number("scale", t.scale);
  t.nb2_target = r.number("nb2_target", t.nb2_target);
  require(t.max_wavenumber >= 1, r.path("max_wavenumber"), "must be at least 1");
  require(t.scale >= 0.0, r.path("scale"), "must be nonnegative");
  require(t.nb2_target >= 0.0, r.path("nb2_target"), "must be nonnegative");
  if (const json* modes = r.child("modes")) {
    const std::string mp = r.path("modes");
    if (!modes->is_array()) Reader::fail(mp, "expected an array of modes");
    for (std::size_t n = 0; n < modes->size(); ++n) {
      const std::string np = mp + "[" + std::to_string(n) + "]";
      const json& mode = (*modes)[n];
      if (!mode.is_array()) Reader::fail(np, "expected an array of terms");
      std::vector<TransportTerm> terms;
      for (std::size_t i = 0; i < mode.size(); ++i) {
        const std::string tp = np + "[" + std::to_string(i) + "]";
        Reader tr(mode[i], tp);
        TransportTerm term;
        const json* k = tr.child("wavevector");
        const json* amp = tr.child("amplitude");
        if (k == nullptr) Reader::fail(tr.path("wavevector"), "missing");
        if (amp == nullptr) Reader::fail(tr.path("amplitude"), "missing");
        term.wavevector = int3(*k, tr.path("wavevector"));
        term.amplitude = real3(*amp, tr.path("amplitude"));
        const std::string phase = tr.string("phase", "sin");
        if (phase != "sin" && phase != "cos") Reader::fail(tr.path("phase"), "expected sin or cos");
        term.sine = phase == "sin";
        tr.finish();
        terms.push_back(term);
      }
      t.modes.push_back(std::move(terms));
    }
  }
  r.finish();
}

int line_of(std::string_view text, std::size_t byte, int& column) {
  int line = 1;
  column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return line;
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  ExperimentConfig c;
  Reader root(doc, "");

  const std::string exp = root.string("experiment", to_string(c.experiment));
  try {
    c.experiment = experiment_from_string(exp);
  } catch (const std::invalid_argument&) {
    Reader::fail("experiment",
                 "expected linear_estimate, local_existence, contraction, global_decay or maximality");
  }
  c.output_dir = root.string("output_dir", c.output_dir);
  c.p = root.number("p", c.p);
  c.a = root.number("a", c.a);
  c.truncated = root.boolean("truncated", c.truncated);
  c.checkpoints = root.boolean("checkpoints", c.checkpoints);
  c.stop_level = root.number("stop_level", c.stop_level);

  if (const json* g = root.child("grid")) {
    Reader r(*g, "grid");
    c.grid_n = static_cast<int>(r.integer("n", c.grid_n));
    c.dealias_fraction = r.number("dealias_fraction", c.dealias_fraction);
    r.finish();
  }
  if (const json* t = root.child("time")) {
    Reader r(*t, "time");
    c.step.dt = r.number("dt", c.step.dt);
    c.step.t_final = r.number("t_final", c.step.t_final);
    c.step.record_every = static_cast<int>(r.integer("record_every", c.step.record_every));
    const std::string scheme = r.string("scheme", to_string(c.step.scheme));
    try {
      c.step.scheme = scheme_from_string(scheme);
    } catch (const std::invalid_argument&) {
      Reader::fail("time.scheme", "expected etd_euler_maruyama or semi_implicit_euler_maruyama");
    }
    r.finish();
  }
  if (const json* e = root.child("ensemble")) {
    Reader r(*e, "ensemble");
    c.n_paths = static_cast<int>(r.integer("n_paths", c.n_paths));
    c.base_seed = r.seed("base_seed", c.base_seed);
    r.finish();
  }
  if (const json* i = root.child("initial")) {
    Reader r(*i, "initial");
    const std::string kind = r.string("kind", "random");
    if (kind != "random" && kind != "zero") Reader::fail("initial.kind", "expected random or zero");
    c.initial.random = kind == "random";
    c.initial.seed = r.seed("seed", c.initial.seed);
    c.initial.max_wavenumber = static_cast<int>(r.integer("max_wavenumber", c.initial.max_wavenumber));
    c.initial.lp_norm = r.number("lp_norm", c.initial.lp_norm);
    require(c.initial.max_wavenumber >= 1, "initial.max_wavenumber", "must be at least 1");
    require(c.initial.lp_norm >= 0.0, "initial.lp_norm", "must be nonnegative");
    r.finish();
  }
  if (const json* n = root.child("noise")) {
    Reader r(*n, "noise");
    c.dim_h = static_cast<int>(r.integer("dim_h", c.dim_h));
    c.c_bdg = r.number("c_bdg", c.c_bdg);
    if (const json* t = r.child("transport")) read_transport(*t, "noise.transport", c.transport);
    if (const json* s = r.child("sigma")) {
      Reader sr(*s, "noise.sigma");
      const std::string kind = sr.string("kind", to_string(c.sigma.kind));
      try {
        c.sigma.kind = sigma_kind_from_string(kind);
      } catch (const std::invalid_argument&) {
        Reader::fail("noise.sigma.kind", "expected zero, diagonal_linear or affine");
      }
      c.sigma.eps0 = sr.number("eps0", c.sigma.eps0);
      c.sigma.c_affine = sr.number("c_affine", c.sigma.c_affine);
      require(c.sigma.eps0 >= 0.0, "noise.sigma.eps0", "must be nonnegative");
      sr.finish();
    }
    if (const json* s = r.child("smallness")) {
      Reader sr(*s, "noise.smallness");
      c.smallness.nb2 = sr.number("nb2", c.smallness.nb2);
      c.smallness.eps0 = sr.number("eps0", c.smallness.eps0);
      sr.finish();
    }
    require(c.dim_h >= 1, "noise.dim_h", "must be at least 1");
    require(c.c_bdg > 0.0, "noise.c_bdg", "must be positive");
    r.finish();
  }
  c.sigma.dim_h = c.dim_h;
  if (const json* cut = root.child("cutoff")) {
    Reader r(*cut, "cutoff");
    c.delta0 = r.number("delta0", c.delta0);
    r.finish();
  }
  if (const json* pic = root.child("picard")) {
    Reader r(*pic, "picard");
    c.picard_max_iter = static_cast<int>(r.integer("max_iter", c.picard_max_iter));
    c.picard_tol = r.number("tol", c.picard_tol);
    c.picard_auto_horizon = r.boolean("auto_horizon", c.picard_auto_horizon);
    require(c.picard_max_iter >= 1, "picard.max_iter", "must be at least 1");
    require(c.picard_tol > 0.0, "picard.tol", "must be positive");
    r.finish();
  }
  if (const json* m = root.child("maximality")) {
    Reader r(*m, "maximality");
    if (const json* lv = r.child("levels")) {
      if (!lv->is_array()) Reader::fail("maximality.levels", "expected an array of numbers");
      for (const auto& v : *lv) {
        if (!v.is_number()) Reader::fail("maximality.levels", "expected an array of numbers");
        c.levels.push_back(v.get<double>());
      }
    }
    r.finish();
  }
  if (const json* l = root.child("linear")) {
    Reader r(*l, "linear");
    c.g_amplitude = r.number("g_amplitude", c.g_amplitude);
    r.finish();
  }
  root.finish();

  // Cross-field checks.
  if (is_nonlinear(c.experiment)) {
    require(c.p > 5.0, "p", "nonlinear experiments require p > 5 (got " + std::to_string(c.p) + ")");
  } else {
    require(c.p > 2.0, "p", "linear_estimate requires p > 2 (got " + std::to_string(c.p) + ")");
  }
  require(c.grid_n >= 4 && c.grid_n % 2 == 0, "grid.n", "must be an even integer >= 4");
  require(c.dealias_fraction > 0.0 && c.dealias_fraction <= 1.0, "grid.dealias_fraction",
          "must lie in (0, 1]");
  require(c.step.dt > 0.0, "time.dt", "must be positive");
  require(c.step.t_final > 0.0, "time.t_final", "must be positive");
  require(c.step.dt <= c.step.t_final, "time.dt", "must not exceed time.t_final");
  require(c.step.record_every >= 1, "time.record_every", "must be at least 1");
  require(c.n_paths >= 2, "ensemble.n_paths", "must be at least 2");
  require(c.delta0 > 0.0, "cutoff.delta0", "must be positive");
  require(c.a >= 0.0, "a", "must be nonnegative");
  require(c.stop_level >= 0.0, "stop_level", "must be nonnegative");
  if (c.transport.kind == TransportKind::explicit_modes) {
    require(static_cast<int>(c.transport.modes.size()) == c.dim_h, "noise.transport.modes",
            "must list exactly noise.dim_h modes");
    for (std::size_t n = 0; n < c.transport.modes.size(); ++n) {
      for (std::size_t i = 0; i < c.transport.modes[n].size(); ++i) {
        for (int k : c.transport.modes[n][i].wavevector) {
          require(2 * std::abs(k) < c.grid_n,
                  "noise.transport.modes[" + std::to_string(n) + "][" + std::to_string(i) +
                      "].wavevector",
                  "wavenumbers must satisfy |k| < grid.n / 2");
        }
      }
    }
  } else {
    require(c.transport.modes.empty(), "noise.transport.modes", "only allowed with kind explicit");
  }
  if (c.experiment == Experiment::maximality) {
    require(!c.levels.empty(), "maximality.levels", "must not be empty");
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
      require(c.levels[i] > 0.0, "maximality.levels", "levels must be positive");
      if (i > 0) require(c.levels[i] >= c.levels[i - 1], "maximality.levels", "must be nondecreasing");
    }
  }
  c.step.weight_rate = c.a;
  return c;
}

json parse_config_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    int column = 0;
    const int line = line_of(text, e.byte == 0 ? 0 : e.byte - 1, column);
    std::ostringstream msg;
    msg << "syntax error at line " << line << ", column " << column << ": " << e.what();
    throw ConfigError(msg.str(), {}, line, column);
  }
  return doc;
}

ExperimentConfig parse_config(std::string_view text) {
  return config_from_json(parse_config_document(text));
}

std::string read_config_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_config_text(path));
}

json to_json(const ExperimentConfig& c) {
  json transport{{"kind", c.transport.kind == TransportKind::none     ? "none"
                          : c.transport.kind == TransportKind::random ? "random"
                                                                       : "explicit"},
                 {"seed", c.transport.seed},
                 {"max_wavenumber", c.transport.max_wavenumber},
                 {"scale", c.transport.scale},
                 {"nb2_target", c.transport.nb2_target}};
  if (c.transport.kind == TransportKind::explicit_modes) {
    json modes = json::array();
    for (const auto& mode : c.transport.modes) {
      json terms = json::array();
      for (const auto& t : mode) {
        terms.push_back({{"wavevector", t.wavevector},
                         {"amplitude", t.amplitude},
                         {"phase", t.sine ? "sin" : "cos"}});
      }
      modes.push_back(std::move(terms));
    }
    transport["modes"] = std::move(modes);
  }
  return json{
      {"experiment", to_string(c.experiment)},
      {"output_dir", c.output_dir},
      {"p", c.p},
      {"a", c.a},
      {"truncated", c.truncated},
      {"checkpoints", c.checkpoints},
      {"stop_level", c.stop_level},
      {"grid", {{"n", c.grid_n}, {"dealias_fraction", c.dealias_fraction}}},
      {"time",
       {{"dt", c.step.dt},
        {"t_final", c.step.t_final},
        {"record_every", c.step.record_every},
        {"scheme", to_string(c.step.scheme)}}},
      {"ensemble", {{"n_paths", c.n_paths}, {"base_seed", c.base_seed}}},
      {"initial",
       {{"kind", c.initial.random ? "random" : "zero"},
        {"seed", c.initial.seed},
        {"max_wavenumber", c.initial.max_wavenumber},
        {"lp_norm", c.initial.lp_norm}}},
      {"noise",
       {{"dim_h", c.dim_h},
        {"c_bdg", c.c_bdg},
        {"transport", transport},
        {"sigma",
         {{"kind", to_string(c.sigma.kind)}, {"eps0", c.sigma.eps0}, {"c_affine", c.sigma.c_affine}}},
        {"smallness", {{"nb2", c.smallness.nb2}, {"eps0", c.smallness.eps0}}}}},
      {"cutoff", {{"delta0", c.delta0}}},
      {"picard",
       {{"max_iter", c.picard_max_iter},
        {"tol", c.picard_tol},
        {"auto_horizon", c.picard_auto_horizon}}},
      {"maximality", {{"levels", c.levels}}},
      {"linear", {{"g_amplitude", c.g_amplitude}}}};
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

TransportCoefficients build_transport(const TransportSpec& spec, const Grid& grid, int dim_h) {
  TransportCoefficients b;
  if (spec.kind == TransportKind::none) return b;

  std::vector<std::vector<TransportTerm>> modes = spec.modes;
  if (spec.kind == TransportKind::random) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32), 0x62u};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<int> kdist(-spec.max_wavenumber, spec.max_wavenumber);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    modes.assign(static_cast<std::size_t>(dim_h), {});
    for (auto& mode : modes) {
      TransportTerm t;
      do {
        for (auto& k : t.wavevector) k = kdist(rng);
      } while (t.wavevector == std::array<int, 3>{0, 0, 0});
      std::array<double, 3> a{normal(rng), normal(rng), normal(rng)};
      const auto& k = t.wavevector;
      const double kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
      const double ak = a[0] * k[0] + a[1] * k[1] + a[2] * k[2];
      for (int i = 0; i < 3; ++i) a[i] -= ak / kk * k[i];
      const double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
      for (int i = 0; i < 3; ++i) t.amplitude[i] = na > 0.0 ? spec.scale * a[i] / na : 0.0;
      t.sine = coin(rng);
      mode.push_back(t);
    }
  }

  const int n = grid.n();
  for (const auto& mode : modes) {
    std::array<std::vector<double>, 3> values;
    for (auto& v : values) v.assign(grid.size(), 0.0);
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 < n; ++i2) {
        for (int i3 = 0; i3 < n; ++i3) {
          const std::size_t f = grid.flat(i1, i2, i3);
          for (const auto& t : mode) {
            const double phase = 2.0 * std::numbers::pi *
                                 (t.wavevector[0] * i1 + t.wavevector[1] * i2 + t.wavevector[2] * i3) /
                                 n;
            const double s = t.sine ? std::sin(phase) : std::cos(phase);
            for (int c = 0; c < 3; ++c) values[c][f] += t.amplitude[c] * s;
          }
        }
      }
    }
    VectorField field;
    for (int c = 0; c < 3; ++c) field[c] = SpectralField::from_physical(grid, values[c]);
    b.modes.push_back(std::move(field));
  }

  if (spec.nb2_target > 0.0) {
    const double nb2 = compute_nbk(b, 2);
    if (nb2 > 0.0) {
      const double s = std::sqrt(spec.nb2_target / nb2);
      for (auto& mode : b.modes) {
        for (auto& c : mode) c *= s;
      }
    }
  }
  return b;
}

State random_solenoidal_state(const Grid& grid, std::uint64_t seed, int max_wavenumber,
                              double lp_target, double p) {
  State u(grid);
  if (lp_target == 0.0) return u;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x75u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int kmax = std::min(max_wavenumber, grid.dealias_cutoff());
  for (auto& c : u.comp) {
    for (std::size_t f = 0; f < grid.size(); ++f) {
      const auto k = grid.wavevector(f);
      const bool keep = std::abs(k[0]) <= kmax && std::abs(k[1]) <= kmax && std::abs(k[2]) <= kmax;
      // Draw for every mode so the sequence does not depend on kmax.
      const Complex z{normal(rng), normal(rng)};
      c[f] = keep ? z : Complex{};
    }
    c.enforce_hermitian();
    c.zero_mean();
    c.dealias();
  }
  const VectorField v = leray_project(u.velocity());
  for (int j = 0; j < 3; ++j) u.comp[j] = v[j];
  const double norm = lp_norm(u, p);
  if (norm > 0.0) u *= lp_target / norm;
  return u;
}

PreparedRun prepare(const ExperimentConfig& cfg) {
  PreparedRun out;
  const Grid grid(cfg.grid_n, cfg.dealias_fraction);
  TransportCoefficients b = build_transport(cfg.transport, grid, cfg.dim_h);
  out.report = assess_assumptions(b, cfg.sigma, grid, cfg.p, cfg.c_bdg, cfg.smallness);

  const bool transport_active = !b.modes.empty();
  for (const auto& f : out.report.failures) {
    const bool local_only = f.rfind("N_b0", 0) == 0;
    if (!local_only || transport_active) out.gate_failures.push_back(f);
  }
  if (cfg.experiment == Experiment::global_decay && !out.report.pass_global &&
      out.gate_failures.empty()) {
    std::ostringstream msg;
    msg << "global smallness not met: N_b2 = " << out.report.n_b[2] << " (limit "
        << cfg.smallness.nb2 << "), eps0 = " << cfg.sigma.eps0 << " (limit " << cfg.smallness.eps0
        << ")";
    if (cfg.sigma.kind == SigmaKind::affine && cfg.sigma.c_affine != 0.0) {
      msg << ", affine sigma with c_affine != 0";
    }
    out.gate_failures.push_back(msg.str());
  }

  auto& e = out.ensemble;
  e.n_paths = cfg.n_paths;
  e.base_seed = cfg.base_seed;
  e.experiment = cfg.experiment;
  e.u0 = cfg.initial.random ? random_solenoidal_state(grid, cfg.initial.seed,
                                                     cfg.initial.max_wavenumber,
                                                     cfg.initial.lp_norm, cfg.p)
                            : State(grid);
  e.noise = NoiseModel(grid, cfg.dim_h, std::move(b), cfg.sigma);
  e.step = cfg.step;
  e.system.p = cfg.p;
  e.system.cutoff.delta0 = cfg.delta0;
  e.system.truncated = cfg.truncated;
  if (cfg.stop_level > 0.0) {
    e.stop.kind = StopKind::norm_threshold;
    e.stop.level = cfg.stop_level;
    e.stop.horizon = cfg.step.t_final;
  }
  e.picard_max_iter = cfg.picard_max_iter;
  e.picard_tol = cfg.picard_tol;
  e.picard_auto_horizon = cfg.picard_auto_horizon;
  e.levels = cfg.levels;
  e.linear_g_amplitude = cfg.g_amplitude;
  return out;
}

}  // namespace bsq
