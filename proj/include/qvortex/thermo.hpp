#ifndef QVORTEX_THERMO_HPP
#define QVORTEX_THERMO_HPP

#include <iosfwd>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qvortex/model.hpp"
#include "qvortex/selfconsistent.hpp"

namespace qvortex {

class NonpositivePressure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Regime { Uniform, EdgePeaked, CenterPeaked };

std::string_view regime_name(Regime r);

// Observables of one equilibrium. Energy in units of Lambda^2/eps, beta in eps/Lambda.
struct ThermoPoint {
  double mu = 0.0;
  double z = 0.0;
  double a = 0.0;
  double energy = 0.0;
  double beta = 0.0;
  double temperature = 0.0;
  double rho0 = 0.0;
  double pressure = 0.0;
  double entropy = 0.0;
  Regime regime = Regime::Uniform;
  double virial_residual = 0.0;
};

struct DensitySample {
  double r;
  double rho;
};

// beta = -eps z v'(z) / Lambda
double beta_of(const ConsistentState& s, const ModelParams& p);

// E = (Lambda^2/eps) (z^2 e^{-v + mu z v'} / (2 (z v')^2) - 1/(-z v'))
double energy_of(const ConsistentState& s, const ModelParams& p);

// rho(0) = eps z^2 / (4 pi beta R^2)
double central_density(const ConsistentState& s, const ModelParams& p);

// rho(r) = rho(0) exp(-v1(z r / R) + mu r^2 z v'(z) / R^2) on n_samples equally spaced r in [0, R].
std::vector<DensitySample> density_profile(const ConsistentState& s, const ModelParams& p,
                                           std::size_t n_samples);
double density_at(const ConsistentState& s, const ModelParams& p, double r);

// Surface pressure p = 2 rho(R) / (3 beta).
double pressure_of(const ConsistentState& s, const ModelParams& p);

// |E - (3 p pi R^2 - Lambda / beta)|, with E from energy_of and the right-hand
// side assembled from the dense profile at r = R.
double virial_residual(const ConsistentState& s, const ModelParams& p);

// S = (1/Gamma) { beta (E - (Lambda^2/eps) ln R) - Lambda ln(p beta^2) + Lambda ln(2 pi Gamma) }
double entropy_of(const ConsistentState& s, const ModelParams& p);

Regime classify_regime(const ConsistentState& s, const ModelParams& p);

// 2 pi int_0^R rho(r) r dr by quadrature over the density.
double integrated_circulation(const ConsistentState& s, const ModelParams& p);

// <r^2> of the normalized density on [0, R].
double mean_square_radius(const ConsistentState& s, const ModelParams& p);

ThermoPoint evaluate(const ConsistentState& s, const ModelParams& p);

// "mu,z,a,beta,T,E,rho0,p,S,regime,virial_residual"
void write_thermo_csv_header(std::ostream& out);
void write_thermo_csv_row(const ThermoPoint& t, std::ostream& out);

}  // namespace qvortex

#endif
