#include "ioncv/ion_model.hpp"

#include <cmath>
#include <string>

#include "ioncv/error.hpp"
#include "ioncv/expm.hpp"

namespace ioncv {

namespace {

double wrap_pi(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

double wrap_half_turn(double x) {
  double y = std::fmod(x, kPi);
  if (y < 0.0) y += kPi;
  return y;
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

IonConfig IonConfig::single(double nu, double rabi0, double eta) {
  IonConfig c;
  c.modes = {{nu, eta}};
  c.rabi0 = rabi0;
  return c;
}

IonConfig IonConfig::pair(ModeParams x, ModeParams y, double rabi0) {
  IonConfig c;
  c.modes = {x, y};
  c.rabi0 = rabi0;
  return c;
}

std::vector<std::string> IonConfig::validate() const {
  if (modes.empty() || modes.size() > 2) throw ConfigError("ion config needs one or two modes");
  if (!(rabi0 > 0.0) || !finite(rabi0)) throw ConfigError("rabi0 must be positive");
  if (!finite(detuning) || !finite(phase)) throw ConfigError("detuning and phase must be finite");
  std::vector<std::string> warnings;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const auto& m = modes[k];
    if (!(m.nu > 0.0) || !finite(m.nu)) throw ConfigError("trap frequency must be positive");
    if (!(m.eta > 0.0 && m.eta < 1.0)) throw ConfigError("Lamb-Dicke parameter must lie in (0, 1)");
    if (m.eta > 0.3) {
      warnings.push_back("mode " + std::to_string(k) + ": eta = " + std::to_string(m.eta) +
                         " is outside the Lamb-Dicke regime");
    }
  }
  return warnings;
}

double IonConfig::rabi() const {
  if (!lamb_dicke_correction) return rabi0;
  double s = 0.0;
  for (const auto& m : modes) s += m.eta * m.eta;
  return rabi0 * std::exp(-s);
}

double corrected_rabi(double rabi0, double eta) { return rabi0 * std::exp(-eta * eta); }

DriveSpec DriveSpec::single(double detuning, double phase) {
  DriveSpec d;
  d.tones = {{detuning, phase, 1.0}};
  return d;
}

void DriveSpec::validate() const {
  if (tones.empty() || tones.size() > 2) throw ConfigError("a drive needs one or two tones");
  for (const auto& t : tones) {
    if (!finite(t.detuning) || !finite(t.phase) || !finite(t.weight)) {
      throw ConfigError("tone parameters must be finite");
    }
  }
  if (!finite(start_time) || start_time < 0.0) throw ConfigError("start time must be >= 0");
}

std::string gate_name(const GateSpec& g) {
  static const char* names[] = {"phase",          "displace",   "squeeze", "beam_splitter",
                                "two_mode_squeeze", "trisqueeze", "kerr"};
  return names[g.index()];
}

std::size_t gate_modes(const GateSpec& g) {
  return (std::holds_alternative<gate::BeamSplitter>(g) ||
          std::holds_alternative<gate::TwoModeSqueeze>(g))
             ? 2
             : 1;
}

void validate_gate(const GateSpec& g) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        bool ok = true;
        if constexpr (std::is_same_v<T, gate::Phase>) ok = finite(p.theta);
        if constexpr (std::is_same_v<T, gate::Displace>) ok = finite(p.alpha.real()) && finite(p.alpha.imag());
        if constexpr (std::is_same_v<T, gate::Kerr>) ok = finite(p.tau);
        if constexpr (std::is_same_v<T, gate::BeamSplitter>) ok = finite(p.theta) && finite(p.phi);
        if constexpr (std::is_same_v<T, gate::Squeeze> || std::is_same_v<T, gate::TwoModeSqueeze> ||
                      std::is_same_v<T, gate::Trisqueeze>) {
          ok = finite(p.r) && finite(p.phi);
          if (ok && p.r < 0.0) throw ConfigError("squeezing magnitude must be >= 0");
        }
        if (!ok) throw ConfigError("gate parameters must be finite");
      },
      g);
}

GateSpec scale_gate(const GateSpec& g, double s) {
  return std::visit(
      [s](auto p) -> GateSpec {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, gate::Phase> || std::is_same_v<T, gate::BeamSplitter>) {
          p.theta *= s;
        } else if constexpr (std::is_same_v<T, gate::Displace>) {
          p.alpha *= s;
        } else if constexpr (std::is_same_v<T, gate::Kerr>) {
          p.tau *= s;
        } else {
          p.r *= s;
        }
        return p;
      },
      g);
}

GateSpec canonical_gate(const GateSpec& g) {
  if (const auto* p = std::get_if<gate::Phase>(&g)) return gate::Phase{wrap_pi(p->theta)};
  if (const auto* k = std::get_if<gate::Kerr>(&g)) return gate::Kerr{wrap_pi(k->tau)};
  return g;
}

namespace {

void check_cutoffs(const IonConfig& config, const std::vector<int>& cutoffs) {
  if (cutoffs.size() != config.modes.size()) {
    throw InvalidDimension("cutoff count does not match the number of modes");
  }
  for (int n : cutoffs) {
    if (n < 2) throw InvalidDimension("cutoff must be at least 2");
  }
}

Layout spin_layout(const std::vector<int>& cutoffs) {
  std::vector<int> dims{2};
  dims.insert(dims.end(), cutoffs.begin(), cutoffs.end());
  return Layout(std::move(dims), true);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix recoil_at_zero(int cutoff, double eta) {
  const Matrix x = ladder(cutoff, Ladder::Annihilate).matrix + ladder(cutoff, Ladder::Create).matrix;
  return HermitianSpectrum(x).exp(cplx(0.0, eta));
}

// diag(e^{iνtn}) E0 diag(e^{−iνtn})
Matrix recoil_at(const Matrix& e0, double nu, double t) {
  const Eigen::Index n = e0.rows();
  Vector ph(n);
  for (Eigen::Index k = 0; k < n; ++k) ph[k] = std::polar(1.0, nu * t * static_cast<double>(k));
  return ph.asDiagonal() * e0 * ph.conjugate().asDiagonal();
}

cplx tone_factor(const DriveSpec& drive, double t) {
  cplx f = 0.0;
  for (const auto& tone : drive.tones) f += tone.weight * std::polar(1.0, -(tone.detuning * t - tone.phase));
  return f;
}

// Spin ⊗ motion operator from a spin matrix and a motional matrix.
Matrix spin_times(const Matrix& spin, const Matrix& motion) { return kron(spin, motion); }

struct Sideband {
  Matrix m;           // lowering operator M on the modes
  int order = 1;      // k
  double coupling = 0.0;  // Π η_j^{k_j}/k_j!
  double magnitude = 0.0;  // m
  double mode_phase = 0.0; // φ_m
  double omega = 0.0;      // tone offset ω
};

Matrix mode_identity(const std::vector<int>& cutoffs) {
  Eigen::Index d = 1;
  for (int n : cutoffs) d *= n;
  return Matrix::Identity(d, d);
}

Matrix power(const Matrix& a, int k) {
  Matrix out = Matrix::Identity(a.rows(), a.cols());
  for (int i = 0; i < k; ++i) out = out * a;
  return out;
}

std::optional<Sideband> sideband_plan(const GateSpec& g, const IonConfig& config,
                                      const std::vector<int>& cutoffs) {
  Sideband s;
  if (const auto* d = std::get_if<gate::Displace>(&g)) {
    s.order = 1;
    s.m = ladder(cutoffs[0], Ladder::Annihilate).matrix;
    s.coupling = config.modes[0].eta;
    s.magnitude = std::abs(d->alpha);
    s.mode_phase = std::arg(d->alpha) + kPi / 2.0;
    s.omega = config.modes[0].nu;
    return s;
  }
  if (const auto* q = std::get_if<gate::Squeeze>(&g)) {
    s.order = 2;
    s.m = power(ladder(cutoffs[0], Ladder::Annihilate).matrix, 2);
    s.coupling = std::pow(config.modes[0].eta, 2) / 2.0;
    s.magnitude = q->r / 2.0;
    s.mode_phase = q->phi - kPi / 2.0;
    s.omega = 2.0 * config.modes[0].nu;
    return s;
  }
  if (const auto* q = std::get_if<gate::Trisqueeze>(&g)) {
    s.order = 3;
    s.m = power(ladder(cutoffs[0], Ladder::Annihilate).matrix, 3);
    s.coupling = std::pow(config.modes[0].eta, 3) / 6.0;
    s.magnitude = q->r;
    s.mode_phase = q->phi;
    s.omega = 3.0 * config.modes[0].nu;
    return s;
  }
  const bool bs = std::holds_alternative<gate::BeamSplitter>(g);
  const bool tms = std::holds_alternative<gate::TwoModeSqueeze>(g);
  if (bs || tms) {
    const Matrix a = ladder(cutoffs[0], Ladder::Annihilate).matrix;
    const Matrix b = ladder(cutoffs[1], Ladder::Annihilate).matrix;
    s.order = 2;
    s.coupling = config.modes[0].eta * config.modes[1].eta;
    if (bs) {
      const auto& p = std::get<gate::BeamSplitter>(g);
      s.m = kron(a, b.adjoint());
      s.magnitude = std::abs(p.theta);
      s.mode_phase = -p.phi + (p.theta < 0.0 ? kPi : 0.0);
      s.omega = config.modes[0].nu - config.modes[1].nu;
    } else {
      const auto& p = std::get<gate::TwoModeSqueeze>(g);
      s.m = kron(a, b);
      s.magnitude = p.r;
      s.mode_phase = kPi - p.phi;
      s.omega = config.modes[0].nu + config.modes[1].nu;
    }
    return s;
  }
  return std::nullopt;
}

void check_compatible(const GateSpec& g, const IonConfig& config) {
  if (gate_modes(g) != config.modes.size()) {
    throw IncompatibleGate(gate_name(g) + " needs " + std::to_string(gate_modes(g)) +
                           " mode(s), config has " + std::to_string(config.modes.size()));
  }
  if (std::holds_alternative<gate::BeamSplitter>(g) && config.modes[0].nu == config.modes[1].nu) {
    throw IncompatibleGate("beam splitter needs distinct trap frequencies");
  }
}

// Spin phase that turns the sideband spin factor into σ_x.
double sideband_spin_phase(int order) { return -order * kPi / 2.0; }

double carrier_phase(double parameter) { return parameter > 0.0 ? kPi : 0.0; }

}  // namespace

DenseOperator full_hamiltonian(double t, const IonConfig& config, const DriveSpec& drive,
                               const std::vector<int>& cutoffs) {
  check_cutoffs(config, cutoffs);
  drive.validate();
  const double lab = drive.start_time + t;
  Matrix e = recoil_at(recoil_at_zero(cutoffs[0], config.modes[0].eta), config.modes[0].nu, lab);
  for (std::size_t j = 1; j < cutoffs.size(); ++j) {
    e = kron(e, recoil_at(recoil_at_zero(cutoffs[j], config.modes[j].eta), config.modes[j].nu, lab));
  }
  const Matrix b = (0.5 * config.rabi0 * tone_factor(drive, lab)) * e;
  const Eigen::Index d = b.rows();
  Matrix h = Matrix::Zero(2 * d, 2 * d);
  h.bottomLeftCorner(d, d) = b;
  h.topRightCorner(d, d) = b.adjoint();
  return {std::move(h), spin_layout(cutoffs)};
}

DenseOperator effective_hamiltonian(const GateSpec& g0, const IonConfig& config,
                                    const std::vector<int>& cutoffs) {
  check_cutoffs(config, cutoffs);
  check_compatible(g0, config);
  const GateSpec g = canonical_gate(g0);
  const double omega = config.rabi();
  if (auto s = sideband_plan(g, config, cutoffs)) {
    const double spin_phase = sideband_spin_phase(s->order) + s->order * kPi / 2.0;
    const Matrix k = std::polar(1.0, s->mode_phase) * s->m.adjoint() +
                     std::polar(1.0, -s->mode_phase) * s->m;
    const Matrix h = (0.5 * omega * s->coupling) * spin_times(sigma_phi(spin_phase).matrix, k);
    return {h, spin_layout(cutoffs)};
  }
  const double eta = config.modes[0].eta;
  const Matrix n = ladder(cutoffs[0], Ladder::Number).matrix;
  if (const auto* p = std::get_if<gate::Phase>(&g)) {
    const Matrix motion = (1.0 - eta * eta / 2.0) * mode_identity(cutoffs) - eta * eta * n;
    const Matrix h = (0.5 * omega) * spin_times(sigma_phi(carrier_phase(p->theta)).matrix, motion);
    return {h, spin_layout(cutoffs)};
  }
  const auto& k = std::get<gate::Kerr>(g);
  const Matrix motion = n * n - n;
  const Matrix h = (omega * std::pow(eta, 4) / 8.0) *
                   spin_times(sigma_phi(carrier_phase(k.tau)).matrix, motion);
  return {h, spin_layout(cutoffs)};
}

GatePulse gate_time_and_drive(const GateSpec& g0, const IonConfig& config) {
  validate_gate(g0);
  check_compatible(g0, config);
  const GateSpec g = canonical_gate(g0);
  const double omega = config.rabi();
  std::vector<int> dims(config.modes.size(), 2);
  if (std::holds_alternative<gate::Trisqueeze>(g)) dims.assign(1, 4);
  if (auto s = sideband_plan(g, config, dims)) {
    const double spin_phase = sideband_spin_phase(s->order);
    GatePulse p;
    p.duration = s->magnitude / (0.5 * omega * s->coupling);
    p.drive.tones = {{s->omega, spin_phase + s->mode_phase, 1.0},
                     {-s->omega, spin_phase - s->mode_phase, 1.0}};
    // Switch on where the off-resonant carrier term cos(ωt − φ_m) peaks.
    p.drive.start_time = s->omega > 0.0 ? wrap_half_turn(s->mode_phase) / s->omega
                                         : wrap_half_turn(-s->mode_phase) / -s->omega;
    return p;
  }
  const double eta = config.modes[0].eta;
  GatePulse p;
  if (const auto* ph = std::get_if<gate::Phase>(&g)) {
    p.duration = 2.0 * std::abs(ph->theta) / (omega * eta * eta);
    p.drive = DriveSpec::single(0.0, carrier_phase(ph->theta));
    return p;
  }
  const auto& k = std::get<gate::Kerr>(g);
  p.duration = 4.0 * std::abs(k.tau) / (omega * std::pow(eta, 4));
  p.drive = DriveSpec::single(0.0, carrier_phase(k.tau));
  return p;
}

IonStepper::IonStepper(const IonConfig& config, const DriveSpec& drive,
                       const std::vector<int>& cutoffs)
    : config_(config), drive_(drive), cutoffs_(cutoffs), layout_(spin_layout(cutoffs)) {
  check_cutoffs(config, cutoffs);
  drive.validate();
  for (std::size_t j = 0; j < cutoffs.size(); ++j) {
    recoil0_.push_back(recoil_at_zero(cutoffs[j], config.modes[j].eta));
  }
}

std::optional<double> IonStepper::period() const {
  if (config_.modes.size() != 1) return std::nullopt;
  const double nu = config_.modes[0].nu;
  for (const auto& tone : drive_.tones) {
    const double k = tone.detuning / nu;
    if (std::abs(k - std::round(k)) > 1e-12 * std::max(1.0, std::abs(k))) return std::nullopt;
  }
  return 2.0 * kPi / nu;
}

Matrix IonStepper::apply_recoil(double lab, const Matrix& x, bool adjoint) const {
  if (cutoffs_.size() == 1) {
    const Eigen::Index n = cutoffs_[0];
    Vector ph(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      ph[k] = std::polar(1.0, config_.modes[0].nu * lab * static_cast<double>(k));
    }
    Matrix y = ph.conjugate().asDiagonal() * x;
    y = adjoint ? Matrix(recoil0_[0].adjoint() * y) : Matrix(recoil0_[0] * y);
    return ph.asDiagonal() * y;
  }
  const Matrix ex = recoil_at(recoil0_[0], config_.modes[0].nu, lab);
  const Matrix ey = recoil_at(recoil0_[1], config_.modes[1].nu, lab);
  const Matrix fx = adjoint ? Matrix(ex.adjoint()) : ex;
  const Matrix fy = adjoint ? Matrix(ey.adjoint()) : ey;
  const Eigen::Index nx = cutoffs_[0];
  const Eigen::Index ny = cutoffs_[1];
  Matrix y(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Eigen::Map<const Matrix> psi_t(x.col(c).data(), ny, nx);
    Eigen::Map<Matrix> out_t(y.col(c).data(), ny, nx);
    out_t = fy * psi_t * fx.transpose();
  }
  return y;
}

void IonStepper::step(double t, double dt, Matrix& x) const {
  const double lab = drive_.start_time + t;
  const cplx c = 0.5 * config_.rabi0 * tone_factor(drive_, lab);
  const double b = std::abs(c);
  if (b * dt == 0.0) return;
  const Eigen::Index d = x.rows() / 2;
  Matrix hx(x.rows(), x.cols());
  hx.topRows(d) = std::conj(c) * apply_recoil(lab, x.bottomRows(d), true);
  hx.bottomRows(d) = c * apply_recoil(lab, x.topRows(d), false);
  x = std::cos(b * dt) * x - cplx(0.0, std::sin(b * dt) / b) * hx;
}

}  // namespace ioncv
