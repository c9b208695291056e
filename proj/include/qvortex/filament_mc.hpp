#ifndef QVORTEX_FILAMENT_MC_HPP
#define QVORTEX_FILAMENT_MC_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvortex/config.hpp"
#include "qvortex/model.hpp"
#include "qvortex/selfconsistent.hpp"

namespace qvortex {

class CoincidentPoints : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MismatchedParameters : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Constants entering the discrete energy.
struct FilamentModel {
  double gamma = 1.0;
  double epsilon = 1.0;
  double alpha = 1.0;
  double mu_prime = 0.0;
  bool interacting = true;
};

// N closed filaments of M points each over the period l; point M wraps to point 0.
class FilamentEnsemble {
 public:
  FilamentEnsemble(std::size_t n_filaments, std::size_t n_points, double period,
                   FilamentModel model);

  // Straight filaments on a centred triangular lattice, scaled so that the
  // mean squared distance from the origin equals mean_square_radius.
  static FilamentEnsemble straight_lattice(std::size_t n_filaments, std::size_t n_points,
                                           double period, FilamentModel model,
                                           double mean_square_radius);

  std::size_t filaments() const noexcept { return n_; }
  std::size_t points() const noexcept { return m_; }
  double period() const noexcept { return period_; }
  double dtau() const noexcept { return period_ / static_cast<double>(m_); }
  const FilamentModel& model() const noexcept { return model_; }

  Point2& at(std::size_t filament, std::size_t point) { return pos_[point * n_ + filament]; }
  const Point2& at(std::size_t filament, std::size_t point) const {
    return pos_[point * n_ + filament];
  }
  // All filaments at one value of tau.
  std::span<const Point2> cross_section(std::size_t point) const {
    return {pos_.data() + point * n_, n_};
  }

 private:
  std::size_t n_, m_;
  double period_;
  FilamentModel model_;
  std::vector<Point2> pos_;  // cross-section major
};

struct EnergyParts {
  double kinetic = 0.0;
  double trap = 0.0;
  double interaction = 0.0;
  double total = 0.0;
};

// K = sum (alpha Gamma / 2) |dphi|^2 / dtau,  A = (mu' Gamma / 2) sum dtau |phi|^2,
// U = -(Gamma^2 / eps) sum_k dtau sum_{i<j} ln |phi_ik - phi_jk|.
EnergyParts discrete_energy(const FilamentEnsemble& ensemble);

struct McConfig {
  double beta_s = 1.0;
  std::uint64_t sweeps = 11000;
  std::uint64_t burn_in = 1000;
  double step_point = 0.05;
  double step_translate = 0.05;
  std::uint64_t seed = 1;
  std::size_t histogram_bins = 50;
  double histogram_rmax = 2.0;
  std::uint64_t trace_stride = 1;
  std::size_t batches = 50;
};

void validate(const McConfig& config);

// Metropolis rule for the weight exp(-beta E): accept when u < exp(-beta dE).
bool metropolis_accept(double delta_e, double beta, double uniform01);

struct Estimate {
  double mean = 0.0;
  double error = 0.0;  // batch-means standard error
};

struct McObservables {
  // Run description, needed to map back onto mean-field parameters.
  std::size_t n_filaments = 0;
  std::size_t n_points = 0;
  double period = 0.0;
  FilamentModel model;
  McConfig config;
  std::vector<std::uint64_t> seeds;

  std::vector<std::uint64_t> trace_sweep;
  std::vector<EnergyParts> energy_trace;
  double acceptance_rate = 0.0;
  double point_acceptance = 0.0;
  double translate_acceptance = 0.0;
  // Largest |incremental - recomputed| total energy seen at the periodic resyncs.
  double energy_drift = 0.0;

  // Cross-section points by distance from the axis; overflow holds r >= rmax.
  std::vector<std::uint64_t> histogram;
  std::uint64_t overflow = 0;
  double bin_width = 0.0;
  std::uint64_t samples = 0;  // retained sweeps

  Estimate mean_square_radius;   // per point <|phi|^2>
  Estimate kinetic_per_filament; // <K> / N
  Estimate total_energy;

  std::uint64_t histogram_mass() const;
  double radius_quantile(double q) const;
  std::string trace_digest() const;
};

McObservables metropolis_run(FilamentEnsemble ensemble, const McConfig& config);

// Independent chains seeded seed, seed+1, ...; histograms summed, estimates
// averaged with combined error bars. The trace is the first chain's.
McObservables run_chains(const FilamentEnsemble& initial, const McConfig& config, unsigned chains);

// Everything an "mc" run needs, read from the shared key = value file.
struct McSetup {
  std::size_t n_filaments = 32;
  std::size_t n_points = 16;
  double period = 1.0;
  FilamentModel model;
  McConfig config;
  ModelParams meanfield;  // lambda_total = N Gamma; radius and mu describe the target state
  double init_mean_square_radius = 0.5;
  unsigned chains = 1;
};

McSetup mc_setup_from_config(const KeyValueConfig& cfg);
FilamentEnsemble initial_ensemble(const McSetup& setup);

struct MeanFieldMapping {
  double mu;          // from mu' through the Lambda = N Gamma parameters
  double beta;        // mean-field beta = Gamma * beta_s * l
  double z;           // sqrt(2 Lambda beta / eps)
};

// Mean-field parameters that correspond to the run (radius from params).
MeanFieldMapping meanfield_mapping(const McObservables& obs, const ModelParams& params);

struct Comparison {
  double l1 = 0.0;                 // sum |p_mc - p_mf| over bins inside R
  double moment_ratio = 0.0;       // <r^2>_mc / <r^2>_mf
  double mc_mean_square_radius = 0.0;
  double mf_mean_square_radius = 0.0;
  double fraction_outside = 0.0;   // MC mass beyond R
  std::size_t bins_used = 0;
};

// Throws MismatchedParameters unless Lambda = N Gamma, mu(mu') = state.mu and
// Gamma * beta_s * l = beta(state), each to relative 1e-6.
void check_mapping(const McObservables& obs, const ConsistentState& state,
                   const ModelParams& params);

Comparison compare_to_meanfield(const McObservables& obs, const ConsistentState& state,
                                const ModelParams& params);

// L1 distance between two histograms normalized to unit mass.
double normalized_l1(std::span<const double> p, std::span<const double> q);

void write_histogram_csv(const McObservables& obs, std::ostream& out);
void write_trace_csv(const McObservables& obs, std::ostream& out);
std::string mc_summary_json(const McObservables& obs);
McObservables mc_summary_from_json(const std::string& text);

}  // namespace qvortex

#endif
