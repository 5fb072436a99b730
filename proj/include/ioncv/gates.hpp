#pragma once

#include <vector>

#include "ioncv/expm.hpp"
#include "ioncv/fock.hpp"
#include "ioncv/ion_model.hpp"

namespace ioncv {

// Ideal gate on bare motional modes:
//   Phase          exp(−iθn)
//   Displace       exp(αa† − α*a)
//   Squeeze        exp((z*a² − z a†²)/2),  z = r e^{iφ}
//   Kerr           exp(iτ a†²a²/2)
//   Trisqueeze     exp(−ir(a†³e^{iφ} + a³e^{−iφ}))
//   BeamSplitter   exp(−iθ(a b† e^{iφ} + a†b e^{−iφ}))
//   TwoModeSqueeze exp(ir(a b e^{iφ} + a†b† e^{−iφ}))
DenseOperator ideal_unitary(const GateSpec& g, const std::vector<int>& cutoffs);

// Hermitian G with ideal_unitary = exp(−iG). Phase and Kerr included.
Matrix gate_generator(const GateSpec& g, const std::vector<int>& cutoffs);

// Single-mode gates with cached spectra, for repeated construction at one cutoff.
class SingleModeGates {
 public:
  explicit SingleModeGates(int cutoff);

  int cutoff() const { return cutoff_; }
  // Diagonal of exp(−iθn).
  Vector phase(double theta) const;
  // Diagonal of exp(iτ n(n−1)/2).
  Vector kerr(double tau) const;
  Matrix displace(cplx alpha) const;
  Matrix squeeze(double r, double phi) const;

 private:
  int cutoff_;
  HermitianSpectrum displace_;  // i(a† − a)
  HermitianSpectrum squeeze_;   // i(a² − a†²)/2
};

}  // namespace ioncv
