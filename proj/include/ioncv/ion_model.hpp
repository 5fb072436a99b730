#pragma once

// Light–ion interaction Hamiltonians and the map from gate parameters to
// pulse durations and bichromatic drives. ħ = 1; all frequencies in rad/s.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ioncv/fock.hpp"

namespace ioncv {

struct ModeParams {
  double nu = 0.0;   // trap angular frequency
  double eta = 0.0;  // Lamb-Dicke parameter
};

struct IonConfig {
  std::vector<ModeParams> modes;  // one or two motional modes
  double rabi0 = 0.0;             // bare Rabi angular frequency Ω₀
  double detuning = 0.0;          // δ = ω − ω₀ of the default drive
  double phase = 0.0;             // laser phase of the default drive
  bool lamb_dicke_correction = true;

  static IonConfig single(double nu, double rabi0, double eta);
  static IonConfig pair(ModeParams x, ModeParams y, double rabi0);

  // Throws ConfigError on violated invariants; returns warnings otherwise.
  std::vector<std::string> validate() const;

  // Ω used for effective Hamiltonians and gate times.
  double rabi() const;
  std::size_t mode_count() const { return modes.size(); }
};

double corrected_rabi(double rabi0, double eta);

struct Tone {
  double detuning = 0.0;
  double phase = 0.0;
  double weight = 1.0;
};

// One or two tones. The Hamiltonian at evolution time t is evaluated at lab
// time start_time + t.
struct DriveSpec {
  std::vector<Tone> tones;
  double start_time = 0.0;

  static DriveSpec single(double detuning, double phase);
  void validate() const;
};

namespace gate {
struct Phase { double theta = 0.0; };
struct Displace { cplx alpha; };
struct Squeeze { double r = 0.0; double phi = 0.0; };
struct BeamSplitter { double theta = 0.0; double phi = 0.0; };
struct TwoModeSqueeze { double r = 0.0; double phi = 0.0; };
struct Trisqueeze { double r = 0.0; double phi = 0.0; };
struct Kerr { double tau = 0.0; };
}  // namespace gate

using GateSpec = std::variant<gate::Phase, gate::Displace, gate::Squeeze, gate::BeamSplitter,
                              gate::TwoModeSqueeze, gate::Trisqueeze, gate::Kerr>;

std::string gate_name(const GateSpec& g);
std::size_t gate_modes(const GateSpec& g);
// Throws ConfigError on non-finite or out-of-range parameters.
void validate_gate(const GateSpec& g);
// Same gate with its strength parameter multiplied by s.
GateSpec scale_gate(const GateSpec& g, double s);
// Phase and Kerr angles wrapped into (−π, π]; other gates unchanged.
GateSpec canonical_gate(const GateSpec& g);

// Full interaction Hamiltonian on spin ⊗ modes at evolution time t.
DenseOperator full_hamiltonian(double t, const IonConfig& config, const DriveSpec& drive,
                               const std::vector<int>& cutoffs);

// Time-independent effective Hamiltonian of the drive that
// gate_time_and_drive returns for this gate.
DenseOperator effective_hamiltonian(const GateSpec& g, const IonConfig& config,
                                    const std::vector<int>& cutoffs);

struct GatePulse {
  double duration = 0.0;
  DriveSpec drive;
};

GatePulse gate_time_and_drive(const GateSpec& g, const IonConfig& config);

// Midpoint-rule step of the full Hamiltonian using the closed form
// exp(−iHΔ) = cos(bΔ) − i sin(bΔ)/b · H, valid because H² = b²·1.
class IonStepper {
 public:
  IonStepper(const IonConfig& config, const DriveSpec& drive, const std::vector<int>& cutoffs);

  const Layout& layout() const { return layout_; }
  // Columns of `x` advanced by exp(−i H(t) dt).
  void step(double t, double dt, Matrix& x) const;
  // Common period of H(t), when all tones are multiples of a single trap frequency.
  std::optional<double> period() const;

 private:
  // y = e^{iγ(t)} x on the motional factor, for each spin block.
  Matrix apply_recoil(double t, const Matrix& x, bool adjoint) const;

  IonConfig config_;
  DriveSpec drive_;
  std::vector<int> cutoffs_;
  Layout layout_;
  std::vector<Matrix> recoil0_;  // exp(iη_j(a_j + a_j†)) per mode
};

}  // namespace ioncv
