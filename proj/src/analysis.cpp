#include "ioncv/analysis.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "ioncv/error.hpp"
#include "ioncv/evolution.hpp"

namespace ioncv {

double fidelity(const FockVector& a, const FockVector& b) {
  if (!(a.layout() == b.layout())) throw LayoutMismatch("fidelity: layouts differ");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double fidelity(const DensityMatrix& a, const FockVector& b) {
  if (!(a.layout() == b.layout())) throw LayoutMismatch("fidelity: layouts differ");
  return std::real(b.amplitudes().dot(a.matrix() * b.amplitudes()));
}

namespace {

void require_single_mode(const Layout& layout) {
  if (layout.dims.size() != 1 || layout.spin) {
    throw InvalidDimension("Wigner function needs a single-mode state");
  }
}

Eigen::VectorXd linspace(double lo, double hi, int n) {
  if (n == 1) return Eigen::VectorXd::Constant(1, 0.5 * (lo + hi));
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

}  // namespace

double WignerGrid::integral() const {
  const double dx = x_axis.size() > 1 ? x_axis[1] - x_axis[0] : 1.0;
  const double dp = p_axis.size() > 1 ? p_axis[1] - p_axis[0] : 1.0;
  return values.sum() * dx * dp;
}

double WignerGrid::at(double x, double p) const {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  (x_axis.array() - x).abs().minCoeff(&i);
  (p_axis.array() - p).abs().minCoeff(&j);
  return values(i, j);
}

// W(α) = (1/π) Σ_{m,k} c_k (−1)^m ρ_{m,m+k} e^{ikθ} ℓ_m^k(4|α|²), with ℓ the
// normalized Laguerre functions, c_0 = 1, c_{k>0} = 2 (real part taken).
double wigner_point(const DensityMatrix& rho, double x, double p) {
  const Matrix& r = rho.matrix();
  const int n = static_cast<int>(r.rows());
  const double u = 2.0 * (x * x + p * p);  // 4|α|², α = (x + ip)/√2
  const double theta = std::atan2(p, x);
  const double log_u = u > 0.0 ? std::log(u) : -std::numeric_limits<double>::infinity();
  double w = 0.0;
  for (int k = 0; k < n; ++k) {
    double prev = 0.0;
    double cur = (k == 0) ? std::exp(-0.5 * u)
                          : std::exp(0.5 * k * log_u - 0.5 * u - 0.5 * std::lgamma(k + 1.0));
    cplx acc = 0.0;
    for (int m = 0; m + k < n; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      acc += sign * cur * r(m, m + k);
      const double next = ((2.0 * m + 1.0 + k - u) * cur - std::sqrt(double(m) * (m + k)) * prev) /
                          std::sqrt((m + 1.0) * (m + k + 1.0));
      prev = cur;
      cur = next;
    }
    if (k == 0) {
      w += acc.real();
    } else {
      w += 2.0 * std::real(acc * std::polar(1.0, k * theta));
    }
  }
  return w / kPi;
}

WignerGrid wigner(const DensityMatrix& rho, const GridSpec& grid) {
  require_single_mode(rho.layout());
  if (grid.resolution < 1) throw InvalidDimension("grid resolution must be positive");
  WignerGrid g;
  g.x_axis = linspace(grid.x_min, grid.x_max, grid.resolution);
  g.p_axis = linspace(grid.p_min, grid.p_max, grid.resolution);
  g.values.resize(g.x_axis.size(), g.p_axis.size());
  for (Eigen::Index i = 0; i < g.x_axis.size(); ++i) {
    for (Eigen::Index j = 0; j < g.p_axis.size(); ++j) {
      g.values(i, j) = wigner_point(rho, g.x_axis[i], g.p_axis[j]);
    }
  }
  return g;
}

WignerGrid wigner(const FockVector& psi, const GridSpec& grid) {
  require_single_mode(psi.layout());
  return wigner(DensityMatrix::pure(psi), grid);
}

double mean_phonon(const DensityMatrix& rho) {
  require_single_mode(rho.layout());
  double s = 0.0;
  for (Eigen::Index k = 0; k < rho.dim(); ++k) s += k * rho.matrix()(k, k).real();
  return s;
}

double mean_phonon(const FockVector& psi, std::size_t mode) {
  return mean_phonon(reduce_to_mode(psi, mode));
}

double leakage(const FockVector& psi, double top_fraction) {
  return top_level_population(psi.amplitudes(), psi.layout(), top_fraction);
}

double leakage(const DensityMatrix& rho, double top_fraction) {
  require_single_mode(rho.layout());
  const int n = static_cast<int>(rho.dim());
  const int top = static_cast<int>(std::ceil(top_fraction * n - 1e-12));
  double s = 0.0;
  for (int k = n - top; k < n; ++k) s += rho.matrix()(k, k).real();
  return s;
}

void write_wigner_csv(const std::string& path, const WignerGrid& grid) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "x,p,W\n";
  for (Eigen::Index i = 0; i < grid.x_axis.size(); ++i) {
    for (Eigen::Index j = 0; j < grid.p_axis.size(); ++j) {
      out << grid.x_axis[i] << ',' << grid.p_axis[j] << ',' << grid.values(i, j) << '\n';
    }
  }
}

nlohmann::json wigner_json(const WignerGrid& grid, const std::string& description) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["convention"] = kQuadratureConvention;
  j["description"] = description;
  j["x_axis"] = std::vector<double>(grid.x_axis.data(), grid.x_axis.data() + grid.x_axis.size());
  j["p_axis"] = std::vector<double>(grid.p_axis.data(), grid.p_axis.data() + grid.p_axis.size());
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
    std::vector<double> row(grid.values.cols());
    for (Eigen::Index k = 0; k < grid.values.cols(); ++k) row[k] = grid.values(i, k);
    rows.push_back(row);
  }
  j["values"] = rows;
  j["integral"] = grid.integral();
  j["min"] = grid.min();
  return j;
}

}  // namespace ioncv
