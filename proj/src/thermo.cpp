#include "qvortex/thermo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>

#include "qvortex/io.hpp"

namespace qvortex {

namespace {

constexpr double pi = std::numbers::pi;

// 8-point Gauss-Legendre on [lo, hi].
template <typename F>
double gauss8(F&& f, double lo, double hi) {
  static constexpr std::array<double, 4> x = {0.1834346424956498, 0.5255324099163290,
                                              0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> w = {0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
  return half * sum;
}

// Integrates f(r) over [0, R] on panels aligned with the ODE steps.
template <typename F>
double integrate_over_disk_radius(const ConsistentState& s, const ModelParams& p, F&& f) {
  const double scale = p.radius / s.z;
  const auto& nodes = s.profile.nodes();
  double total = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double lo = nodes[i - 1].r1 * scale;
    const double hi = std::min(nodes[i].r1 * scale, p.radius);
    if (hi > lo) total += gauss8(f, lo, hi);
  }
  return total;
}

}  // namespace

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::Uniform: return "Uniform";
    case Regime::EdgePeaked: return "EdgePeaked";
    case Regime::CenterPeaked: return "CenterPeaked";
  }
  return "Unknown";
}

double beta_of(const ConsistentState& s, const ModelParams& p) {
  return -p.epsilon * s.z * s.v1p_z / p.lambda_total;
}

double energy_of(const ConsistentState& s, const ModelParams& p) {
  const double x = -s.z * s.v1p_z;  // -z v'(z) > 0
  const double boundary = s.z * s.z * std::exp(-s.v1_z + s.mu * s.z * s.v1p_z) / (2.0 * x * x);
  return p.lambda_total * p.lambda_total / p.epsilon * (boundary - 1.0 / x);
}

double central_density(const ConsistentState& s, const ModelParams& p) {
  return p.epsilon * s.z * s.z / (4.0 * pi * beta_of(s, p) * p.radius * p.radius);
}

double density_at(const ConsistentState& s, const ModelParams& p, double r) {
  const double r1 = std::min(s.z * r / p.radius, s.profile.r_max());
  const double trap = s.mu * r * r * s.z * s.v1p_z / (p.radius * p.radius);
  return central_density(s, p) * std::exp(-s.profile.v1(r1) + trap);
}

std::vector<DensitySample> density_profile(const ConsistentState& s, const ModelParams& p,
                                           std::size_t n_samples) {
  if (n_samples < 2) throw std::invalid_argument("density_profile needs at least 2 samples");
  std::vector<DensitySample> out;
  out.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double r = (i + 1 == n_samples) ? p.radius
                                          : p.radius * static_cast<double>(i) / (n_samples - 1);
    out.push_back({r, density_at(s, p, r)});
  }
  return out;
}

double pressure_of(const ConsistentState& s, const ModelParams& p) {
  return 2.0 * density_at(s, p, p.radius) / (3.0 * beta_of(s, p));
}

double virial_residual(const ConsistentState& s, const ModelParams& p) {
  const double area = pi * p.radius * p.radius;
  const double via_pressure = 3.0 * pressure_of(s, p) * area - p.lambda_total / beta_of(s, p);
  return std::abs(energy_of(s, p) - via_pressure);
}

double entropy_of(const ConsistentState& s, const ModelParams& p) {
  const double beta = beta_of(s, p);
  const double pressure = pressure_of(s, p);
  if (!(pressure > 0.0))
    throw NonpositivePressure("surface pressure " + format_double(pressure) + " is not positive");
  const double lam = p.lambda_total;
  const double e = energy_of(s, p);
  return (beta * (e - lam * lam / p.epsilon * std::log(p.radius)) -
          lam * std::log(pressure * beta * beta) + lam * std::log(2.0 * pi * p.gamma)) /
         p.gamma;
}

Regime classify_regime(const ConsistentState& s, const ModelParams& p) {
  const auto prof = density_profile(s, p, 257);
  const double rho0 = prof.front().rho;
  auto [lo, hi] = std::minmax_element(prof.begin(), prof.end(),
                                      [](const auto& x, const auto& y) { return x.rho < y.rho; });
  if ((hi->rho - lo->rho) / rho0 <= 1e-6) return Regime::Uniform;
  return prof.back().rho > rho0 ? Regime::EdgePeaked : Regime::CenterPeaked;
}

double integrated_circulation(const ConsistentState& s, const ModelParams& p) {
  return 2.0 * pi *
         integrate_over_disk_radius(s, p, [&](double r) { return density_at(s, p, r) * r; });
}

double mean_square_radius(const ConsistentState& s, const ModelParams& p) {
  const double m0 = integrate_over_disk_radius(s, p, [&](double r) { return density_at(s, p, r) * r; });
  const double m2 =
      integrate_over_disk_radius(s, p, [&](double r) { return density_at(s, p, r) * r * r * r; });
  return m2 / m0;
}

ThermoPoint evaluate(const ConsistentState& s, const ModelParams& p) {
  ThermoPoint t;
  t.mu = s.mu;
  t.z = s.z;
  t.a = s.a;
  t.beta = beta_of(s, p);
  t.temperature = 1.0 / t.beta;
  t.energy = energy_of(s, p);
  t.rho0 = central_density(s, p);
  t.pressure = pressure_of(s, p);
  t.entropy = entropy_of(s, p);
  t.regime = classify_regime(s, p);
  t.virial_residual = virial_residual(s, p);
  return t;
}

void write_thermo_csv_header(std::ostream& out) {
  out << "# qvortex thermo v1\n";
  out << "mu,z,a,beta,T,E,rho0,p,S,regime,virial_residual\n";
}

void write_thermo_csv_row(const ThermoPoint& t, std::ostream& out) {
  out << format_double(t.mu) << ',' << format_double(t.z) << ',' << format_double(t.a) << ','
      << format_double(t.beta) << ',' << format_double(t.temperature) << ','
      << format_double(t.energy) << ',' << format_double(t.rho0) << ','
      << format_double(t.pressure) << ',' << format_double(t.entropy) << ','
      << regime_name(t.regime) << ',' << format_double(t.virial_residual) << '\n';
}

}  // namespace qvortex
