#pragma once

#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "ioncv/fock.hpp"

namespace ioncv {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kQuadratureConvention = "X=(a+a^dag)/sqrt2,P=i(a^dag-a)/sqrt2";

// |<a|b>|².
double fidelity(const FockVector& a, const FockVector& b);
// <b|ρ|b>.
double fidelity(const DensityMatrix& a, const FockVector& b);

struct GridSpec {
  double x_min = -5.0;
  double x_max = 5.0;
  double p_min = -5.0;
  double p_max = 5.0;
  int resolution = 201;
};

struct WignerGrid {
  Eigen::VectorXd x_axis;
  Eigen::VectorXd p_axis;
  Eigen::MatrixXd values;  // values(i, j) = W(x_i, p_j)

  double integral() const;
  double min() const { return values.minCoeff(); }
  double at(double x, double p) const;  // nearest grid point
};

// Single-mode states only; reduce over other subsystems first.
WignerGrid wigner(const DensityMatrix& rho, const GridSpec& grid = {});
WignerGrid wigner(const FockVector& psi, const GridSpec& grid = {});
double wigner_point(const DensityMatrix& rho, double x, double p);

double mean_phonon(const FockVector& psi, std::size_t mode = 0);
double mean_phonon(const DensityMatrix& rho);
// Population in the top ⌈fraction·N⌉ Fock levels.
double leakage(const FockVector& psi, double top_fraction = 0.1);
double leakage(const DensityMatrix& rho, double top_fraction = 0.1);

void write_wigner_csv(const std::string& path, const WignerGrid& grid);
nlohmann::json wigner_json(const WignerGrid& grid, const std::string& description);

}  // namespace ioncv
