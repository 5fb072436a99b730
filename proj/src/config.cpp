#include "ioncv/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ioncv/error.hpp"
#include "ioncv/gates.hpp"

namespace ioncv {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Typed access to one JSON object; remembers which keys were read.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where(key) + " has the wrong type");
    }
  }

  double number(const std::string& key, double fallback) {
    const double v = get<double>(key, fallback);
    if (!std::isfinite(v)) throw ConfigError(where(key) + " must be finite");
    return v;
  }

  int positive(const std::string& key, int fallback) {
    const int v = get<int>(key, fallback);
    if (v < 1) throw ConfigError(where(key) + " must be >= 1");
    return v;
  }

  const nlohmann::json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  Reader sub(const std::string& key) { return Reader(raw(key), where(key)); }

  std::string where(const std::string& key = "") const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    std::string unknown;
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + where(k);
    }
    if (!unknown.empty()) throw ConfigError("unknown config key(s): " + unknown);
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> used_;
};

CommonOptions read_common(Reader& r, const std::string& experiment) {
  CommonOptions c;
  if (r.has("experiment")) {
    const auto e = r.get<std::string>("experiment", "");
    if (e != experiment) {
      throw ConfigError("config is for experiment '" + e + "', not '" + experiment + "'");
    }
  }
  c.seed = r.get<std::uint64_t>("seed", c.seed);
  c.threads = r.positive("threads", c.threads);
  c.output_dir = r.get<std::string>("output_dir", c.output_dir);
  if (r.has("mode")) {
    c.mode = r.get<std::string>("mode", "");
    parse_forward_mode(*c.mode);
  }
  return c;
}

IonConfig read_ion(Reader& r) {
  const IonConfig d = default_ion();
  const double nu = r.number("trap_frequency_hz", d.modes[0].nu / kTwoPi);
  const double rabi = r.number("rabi_frequency_hz", d.rabi0 / kTwoPi);
  const double eta = r.number("lamb_dicke", d.modes[0].eta);
  IonConfig ion = IonConfig::single(kTwoPi * nu, kTwoPi * rabi, eta);
  if (r.has("second_mode")) {
    Reader m = r.sub("second_mode");
    ModeParams y;
    y.nu = kTwoPi * m.number("trap_frequency_hz", 0.0);
    y.eta = m.number("lamb_dicke", eta);
    m.finish();
    ion = IonConfig::pair(ion.modes[0], y, ion.rabi0);
  }
  ion.lamb_dicke_correction = r.get<bool>("lamb_dicke_correction", true);
  r.finish();
  ion.validate();
  return ion;
}

GridSpec read_grid(Reader& r) {
  GridSpec g;
  g.x_min = r.number("x_min", g.x_min);
  g.x_max = r.number("x_max", g.x_max);
  g.p_min = r.number("p_min", g.p_min);
  g.p_max = r.number("p_max", g.p_max);
  g.resolution = r.positive("resolution", g.resolution);
  r.finish();
  if (g.x_max <= g.x_min || g.p_max <= g.p_min || g.resolution < 2) {
    throw ConfigError(r.where() + " must span a non-empty range with resolution >= 2");
  }
  return g;
}

TrainConfig read_train(Reader& r, std::uint64_t seed) {
  TrainConfig t;
  t.learning_rate = r.number("learning_rate", t.learning_rate);
  t.beta1 = r.number("beta1", t.beta1);
  t.beta2 = r.number("beta2", t.beta2);
  t.epsilon = r.number("epsilon", t.epsilon);
  t.max_iters = r.get<int>("max_iters", t.max_iters);
  t.fd_step = r.number("fd_step", t.fd_step);
  r.finish();
  t.seed = seed;
  try {
    t.validate();
  } catch (const Error& e) {
    throw ConfigError(r.where() + ": " + e.what());
  }
  return t;
}

std::vector<int> read_layers(Reader& r, std::vector<int> fallback) {
  auto v = r.get<std::vector<int>>("layer_counts", std::move(fallback));
  if (v.empty()) throw ConfigError(r.where("layer_counts") + " must not be empty");
  for (int l : v) {
    if (l < 1) throw ConfigError(r.where("layer_counts") + " entries must be >= 1");
  }
  return v;
}

cplx read_alpha(Reader& r) { return {r.number("alpha_re", 0.0), r.number("alpha_im", 0.0)}; }

}  // namespace

IonConfig default_ion() { return IonConfig::single(kTwoPi * 3.0e6, kTwoPi * 1.0e5, 0.05); }

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

GateSpec parse_gate(const nlohmann::json& j) {
  Reader r(j, "gate");
  const auto kind = r.get<std::string>("kind", "");
  GateSpec g;
  if (kind == "phase") {
    g = gate::Phase{r.number("theta", 0.0)};
  } else if (kind == "displace") {
    g = gate::Displace{read_alpha(r)};
  } else if (kind == "squeeze") {
    g = gate::Squeeze{r.number("r", 0.0), r.number("phi", 0.0)};
  } else if (kind == "beam_splitter") {
    g = gate::BeamSplitter{r.number("theta", 0.0), r.number("phi", 0.0)};
  } else if (kind == "two_mode_squeeze") {
    g = gate::TwoModeSqueeze{r.number("r", 0.0), r.number("phi", 0.0)};
  } else if (kind == "trisqueeze") {
    g = gate::Trisqueeze{r.number("r", 0.0), r.number("phi", 0.0)};
  } else if (kind == "kerr") {
    g = gate::Kerr{r.number("tau", 0.0)};
  } else {
    throw ConfigError("gate.kind '" + kind +
                      "' is not one of phase, displace, squeeze, beam_splitter, "
                      "two_mode_squeeze, trisqueeze, kerr");
  }
  r.finish();
  validate_gate(g);
  return g;
}

BenchGateConfig parse_bench_gate(const nlohmann::json& j) {
  Reader r(j, "");
  BenchGateConfig c;
  c.common = read_common(r, "bench-gate");
  BenchmarkSpec& s = c.spec;
  s.gate = r.has("gate") ? parse_gate(r.raw("gate")) : GateSpec{gate::Displace{3.0}};
  if (r.has("ion")) {
    Reader ion = r.sub("ion");
    s.ion = read_ion(ion);
  } else {
    s.ion = default_ion();
  }
  if (gate_modes(s.gate) != s.ion.mode_count()) {
    throw ConfigError("gate '" + gate_name(s.gate) + "' needs " +
                      std::to_string(gate_modes(s.gate)) + " mode(s); set ion.second_mode accordingly");
  }
  c.etas = r.get<std::vector<double>>("eta_sweep", {0.02, 0.05, 0.1, 0.15});
  for (double e : c.etas) {
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("eta_sweep entries must lie in (0, 1)");
  }
  if (r.has("initial")) {
    Reader in = r.sub("initial");
    s.initial = in.get<std::string>("kind", "vacuum");
    s.initial_alpha = read_alpha(in);
    in.finish();
    if (s.initial != "vacuum" && s.initial != "coherent") {
      throw ConfigError("initial.kind must be 'vacuum' or 'coherent'");
    }
  }
  s.cutoff = r.positive("cutoff", s.cutoff);
  s.samples = r.positive("samples", s.samples);
  s.with_wigner = r.get<bool>("wigner", true);
  if (r.has("grid")) {
    Reader g = r.sub("grid");
    s.grid = read_grid(g);
  }
  s.initial_substeps = r.get<long long>("initial_substeps", s.initial_substeps);
  if (s.initial_substeps < 1) throw ConfigError("initial_substeps must be >= 1");
  s.tolerance = r.number("tolerance", s.tolerance);
  if (!(s.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  r.finish();
  return c;
}

RegressionConfig parse_regression(const nlohmann::json& j) {
  Reader r(j, "");
  RegressionConfig c;
  c.common = read_common(r, "train-regression");
  RegressionSpec& s = c.spec;
  s.target = parse_target_function(r.get<std::string>("target", "sine"));
  s.layer_counts = read_layers(r, s.layer_counts);
  s.seeds = r.positive("seeds", s.seeds);
  s.n_train = r.positive("n_train", s.n_train);
  s.n_test = r.positive("n_test", s.n_test);
  s.x_min = r.number("x_min", s.x_min);
  s.x_max = r.number("x_max", s.x_max);
  if (s.x_max <= s.x_min) throw ConfigError("x_max must exceed x_min");
  s.cutoff = r.positive("cutoff", s.cutoff);
  if (r.has("train")) {
    Reader t = r.sub("train");
    s.train = read_train(t, c.common.seed);
  }
  s.train.seed = c.common.seed;
  s.threads = c.common.threads;
  if (r.has("ion")) {
    Reader ion = r.sub("ion");
    c.ion = read_ion(ion);
  } else {
    c.ion = default_ion();
  }
  c.physical_points = r.positive("physical_points", c.physical_points);
  r.finish();
  return c;
}

StatePrepConfig parse_state_prep(const nlohmann::json& j) {
  Reader r(j, "");
  StatePrepConfig c;
  c.common = read_common(r, "prepare-state");
  StatePrepSpec& s = c.spec;
  if (r.has("target")) {
    Reader t = r.sub("target");
    const auto kind = t.get<std::string>("kind", "random");
    if (kind != "random" && kind != "vacuum") {
      throw ConfigError("target.kind must be 'random' or 'vacuum'");
    }
    s.vacuum_target = kind == "vacuum";
    s.target_seeds = t.get<std::vector<std::uint64_t>>("seeds", s.target_seeds);
    if (s.target_seeds.empty()) throw ConfigError("target.seeds must not be empty");
    s.envelope_sigma = t.number("envelope_sigma", s.envelope_sigma);
    if (!(s.envelope_sigma > 0.0)) throw ConfigError("target.envelope_sigma must be positive");
    t.finish();
  }
  s.layer_counts = read_layers(r, s.layer_counts);
  s.inits = r.positive("inits", s.inits);
  s.cutoff = r.positive("cutoff", s.cutoff);
  if (s.cutoff < 20) throw ConfigError("cutoff must be >= 20 to hold the target amplitudes");
  if (r.has("train")) {
    Reader t = r.sub("train");
    s.train = read_train(t, c.common.seed);
  }
  s.train.seed = c.common.seed;
  s.threads = c.common.threads;
  s.with_wigner = r.get<bool>("wigner", true);
  if (r.has("grid")) {
    Reader g = r.sub("grid");
    s.grid = read_grid(g);
  }
  if (r.has("ion")) {
    Reader ion = r.sub("ion");
    c.ion = read_ion(ion);
  } else {
    c.ion = default_ion();
  }
  r.finish();
  return c;
}

WignerConfig parse_wigner(const nlohmann::json& j) {
  Reader r(j, "");
  WignerConfig c;
  c.common = read_common(r, "wigner");
  if (r.has("state")) {
    Reader st = r.sub("state");
    StateDescription& d = c.state;
    d.kind = st.get<std::string>("kind", d.kind);
    d.n = st.get<int>("n", d.n);
    d.alpha = read_alpha(st);
    d.r = st.number("r", d.r);
    d.phi = st.number("phi", d.phi);
    d.parity = st.get<std::string>("parity", d.parity);
    d.seed = st.get<std::uint64_t>("seed", d.seed);
    d.envelope_sigma = st.number("envelope_sigma", d.envelope_sigma);
    st.finish();
  }
  c.cutoff = r.positive("cutoff", c.cutoff);
  if (r.has("grid")) {
    Reader g = r.sub("grid");
    c.grid = read_grid(g);
  }
  r.finish();
  c.state.state(c.cutoff);
  return c;
}

ValidateConfig parse_validate(const nlohmann::json& j) {
  Reader r(j, "");
  ValidateConfig c;
  c.common = read_common(r, "validate");
  r.finish();
  return c;
}

FockVector StateDescription::state(int cutoff) const {
  if (cutoff < 2) throw ConfigError("cutoff must be >= 2");
  if (kind == "vacuum") return fock_state(0, cutoff);
  if (kind == "fock") {
    if (n < 0 || n >= cutoff) throw ConfigError("state.n must lie in [0, cutoff)");
    return fock_state(n, cutoff);
  }
  if (kind == "coherent") return coherent(alpha, cutoff);
  if (kind == "cat") {
    if (parity != "even" && parity != "odd") throw ConfigError("state.parity must be 'even' or 'odd'");
    if (alpha == 0.0 && parity == "odd") throw ConfigError("odd cat needs alpha != 0");
    const double sign = parity == "even" ? 1.0 : -1.0;
    Vector v = coherent(alpha, cutoff).amplitudes() + sign * coherent(-alpha, cutoff).amplitudes();
    return FockVector(v, Layout::mode(cutoff)).normalized();
  }
  if (kind == "squeezed") {
    const FockVector s = ideal_unitary(gate::Squeeze{r, phi}, {cutoff}).apply(fock_state(0, cutoff));
    const double leak = leakage(s);
    if (leak > 1e-6) throw CutoffTooSmall("squeezed state leaks above the cutoff", leak);
    return s;
  }
  if (kind == "random") {
    if (cutoff < 20) throw ConfigError("random target states need cutoff >= 20");
    return random_target_state(seed, envelope_sigma).state(cutoff);
  }
  throw ConfigError("state.kind '" + kind +
                    "' is not one of vacuum, fock, coherent, cat, squeezed, random");
}

nlohmann::json StateDescription::to_json() const {
  nlohmann::json j{{"kind", kind}};
  if (kind == "fock") j["n"] = n;
  if (kind == "coherent" || kind == "cat") {
    j["alpha_re"] = alpha.real();
    j["alpha_im"] = alpha.imag();
  }
  if (kind == "cat") j["parity"] = parity;
  if (kind == "squeezed") {
    j["r"] = r;
    j["phi"] = phi;
  }
  if (kind == "random") {
    j["seed"] = seed;
    j["envelope_sigma"] = envelope_sigma;
  }
  return j;
}

const char* config_reference() {
  return R"(Config files are JSON objects. Unknown keys are rejected.
Frequencies are plain Hz (3.0e6 means 2*pi x 3 MHz) and are converted to rad/s.

Keys accepted by every subcommand:
  experiment        string   must equal the subcommand name if present
  seed              integer  base seed (default 0); --seed overrides
  threads           integer  worker pool size (default 1); --threads overrides
  output_dir        string   output directory (default "."); --out-dir overrides
  mode              string   ideal | effective | physical; --mode overrides

ion object (bench-gate, train-regression, prepare-state):
  trap_frequency_hz      number  default 3.0e6
  rabi_frequency_hz      number  bare Rabi frequency, default 1.0e5
  lamb_dicke             number  eta of the first mode, default 0.05
  second_mode            object  {trap_frequency_hz, lamb_dicke}; required by two-mode gates
  lamb_dicke_correction  bool    Omega = Omega0*exp(-sum eta^2), default true

grid object (bench-gate, prepare-state, wigner):
  x_min, x_max, p_min, p_max  number   default -5, 5, -5, 5
  resolution                  integer  points per axis, default 201

train object (train-regression, prepare-state):
  learning_rate  default 0.001     beta1    default 0.9
  beta2          default 0.999     epsilon  default 1e-8
  max_iters      default 2000      fd_step  default 1e-4

bench-gate:
  gate              object   {kind, ...}; kinds and parameters:
                               phase {theta}, displace {alpha_re, alpha_im},
                               squeeze {r, phi}, beam_splitter {theta, phi},
                               two_mode_squeeze {r, phi}, trisqueeze {r, phi}, kerr {tau}
                             default displace alpha = 3
  ion               object   see above
  eta_sweep         array    eta values applied to every mode,
                             default [0.02, 0.05, 0.1, 0.15]; [] runs ion.lamb_dicke only
  initial           object   {kind: vacuum | coherent, alpha_re, alpha_im}, default vacuum
  cutoff            integer  Fock cutoff per mode, default 40
  samples           integer  fidelity samples along the pulse, default 20
  wigner            bool     write final and target Wigner grids, default true
  grid              object   see above
  initial_substeps  integer  midpoint steps per trap period to start from, default 256
  tolerance         number   end-state fidelity tolerance, default 1e-9
  mode physical runs the full Hamiltonian (default); ideal or effective
  runs the effective Hamiltonian.

train-regression:
  target           string   sine | heaviside, default sine
  layer_counts     array    default [1, 2, 3, 4, 6]
  seeds            integer  initializations per layer count, default 11
  n_train, n_test  integer  default 50 each, uniform on [x_min, x_max]
  x_min, x_max     number   default -1, 1
  cutoff           integer  default 30
  train            object   see above
  ion              object   used when mode is effective or physical
  physical_points  integer  test points re-evaluated in non-ideal mode, default 11

prepare-state:
  target        object   {kind: random | vacuum, seeds: [1], envelope_sigma: 5}
  layer_counts  array    default [1, 2, 3]
  inits         integer  initializations per layer count and target, default 30
  cutoff        integer  default 20 (minimum 20)
  train         object   see above
  wigner        bool     write Wigner grids of the best run, default true
  grid          object   see above
  ion           object   used when mode is effective or physical

wigner:
  state   object   {kind, ...}; kinds and parameters:
                     vacuum, fock {n}, coherent {alpha_re, alpha_im},
                     cat {alpha_re, alpha_im, parity: even | odd},
                     squeezed {r, phi}, random {seed, envelope_sigma}
  cutoff  integer  default 40
  grid    object   see above

validate:
  no keys beyond the common ones.
)";
}

}  // namespace ioncv
