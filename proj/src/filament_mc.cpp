#include "qvortex/filament_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qvortex/io.hpp"
#include "qvortex/thermo.hpp"

namespace qvortex {

namespace {

constexpr double kMinPairDist2 = 1e-24;  // (1e-12)^2
constexpr std::uint64_t kResyncInterval = 1000;

double norm2(Point2 p) { return p.x * p.x + p.y * p.y; }
double dist2(Point2 a, Point2 b) { return norm2({a.x - b.x, a.y - b.y}); }

// Sum of logs of ratios with one log per ~100 decades of accumulated product.
class LogRatioSum {
 public:
  void add(double ratio) {
    prod_ *= ratio;
    if (prod_ > 1e150 || prod_ < 1e-150) {
      acc_ += std::log(prod_);
      prod_ = 1.0;
    }
  }
  double value() const { return acc_ + std::log(prod_); }

 private:
  double acc_ = 0.0;
  double prod_ = 1.0;
};

class Uniform01 {
 public:
  explicit Uniform01(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double symmetric(double half_width) { return half_width * (2.0 * (*this)() - 1.0); }

 private:
  std::mt19937_64 rng_;
};

Estimate batch_estimate(const std::vector<double>& series, std::size_t batches) {
  Estimate e;
  if (series.empty()) return e;
  double sum = 0.0;
  for (double x : series) sum += x;
  e.mean = sum / static_cast<double>(series.size());
  batches = std::min(batches, series.size());
  if (batches < 2) return e;
  const std::size_t size = series.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = b * size; i < (b + 1) * size; ++i) means[b] += series[i];
    means[b] /= static_cast<double>(size);
  }
  double mbar = 0.0;
  for (double m : means) mbar += m;
  mbar /= static_cast<double>(batches);
  double var = 0.0;
  for (double m : means) var += (m - mbar) * (m - mbar);
  var /= static_cast<double>(batches - 1);
  e.error = std::sqrt(var / static_cast<double>(batches));
  return e;
}

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

class Chain {
 public:
  Chain(FilamentEnsemble ens, const McConfig& cfg)
      : ens_(std::move(ens)), cfg_(cfg), rng_(cfg.seed) {
    const auto& m = ens_.model();
    const double dtau = ens_.dtau();
    kin_ = m.alpha * m.gamma / (2.0 * dtau);
    trap_ = m.mu_prime * m.gamma * dtau / 2.0;
    pair_ = -(m.gamma * m.gamma / m.epsilon) * dtau * 0.5;  // per ln d^2
    energy_ = discrete_energy(ens_);
  }

  McObservables run() {
    const std::size_t n = ens_.filaments(), m = ens_.points();
    McObservables obs;
    obs.n_filaments = n;
    obs.n_points = m;
    obs.period = ens_.period();
    obs.model = ens_.model();
    obs.config = cfg_;
    obs.seeds = {cfg_.seed};
    obs.histogram.assign(cfg_.histogram_bins, 0);
    obs.bin_width = cfg_.histogram_rmax / static_cast<double>(cfg_.histogram_bins);

    std::vector<double> msr_series, kin_series, total_series;
    const auto retained = cfg_.sweeps - cfg_.burn_in;
    msr_series.reserve(retained);
    kin_series.reserve(retained);
    total_series.reserve(retained);

    for (std::uint64_t sweep = 0; sweep < cfg_.sweeps; ++sweep) {
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < n; ++i) point_move(i, k);
      for (std::size_t i = 0; i < n; ++i) translate_move(i);

      if ((sweep + 1) % kResyncInterval == 0) {
        const auto exact = discrete_energy(ens_);
        const double tracked = energy_.kinetic + energy_.trap + energy_.interaction;
        obs.energy_drift = std::max(obs.energy_drift, std::abs(tracked - exact.total));
        energy_ = exact;
      }
      energy_.total = energy_.kinetic + energy_.trap + energy_.interaction;

      if (sweep % cfg_.trace_stride == 0) {
        obs.trace_sweep.push_back(sweep);
        obs.energy_trace.push_back(energy_);
      }
      if (sweep < cfg_.burn_in) continue;

      double r2sum = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        for (const auto& p : ens_.cross_section(k)) {
          const double r2 = norm2(p);
          r2sum += r2;
          const auto bin = static_cast<std::size_t>(std::sqrt(r2) / obs.bin_width);
          if (bin < obs.histogram.size())
            ++obs.histogram[bin];
          else
            ++obs.overflow;
        }
      }
      msr_series.push_back(r2sum / static_cast<double>(n * m));
      kin_series.push_back(energy_.kinetic / static_cast<double>(n));
      total_series.push_back(energy_.total);
    }

    obs.samples = retained;
    obs.point_acceptance = point_tries_ ? double(point_acc_) / double(point_tries_) : 0.0;
    obs.translate_acceptance = trans_tries_ ? double(trans_acc_) / double(trans_tries_) : 0.0;
    obs.acceptance_rate = double(point_acc_ + trans_acc_) / double(point_tries_ + trans_tries_);
    obs.mean_square_radius = batch_estimate(msr_series, cfg_.batches);
    obs.kinetic_per_filament = batch_estimate(kin_series, cfg_.batches);
    obs.total_energy = batch_estimate(total_series, cfg_.batches);
    return obs;
  }

 private:
  void point_move(std::size_t i, std::size_t k) {
    ++point_tries_;
    const std::size_t m = ens_.points();
    const Point2 p = ens_.at(i, k);
    const Point2 q{p.x + rng_.symmetric(cfg_.step_point), p.y + rng_.symmetric(cfg_.step_point)};
    const double u = rng_();
    const Point2 prev = ens_.at(i, (k + m - 1) % m);
    const Point2 next = ens_.at(i, (k + 1) % m);

    const double dk = kin_ * (dist2(q, prev) + dist2(next, q) - dist2(p, prev) - dist2(next, p));
    const double da = trap_ * (norm2(q) - norm2(p));
    double du = 0.0;
    if (ens_.model().interacting) {
      LogRatioSum logs;
      const auto section = ens_.cross_section(k);
      for (std::size_t j = 0; j < section.size(); ++j) {
        if (j == i) continue;
        const double d2new = dist2(q, section[j]);
        if (d2new < kMinPairDist2) return;
        logs.add(d2new / dist2(p, section[j]));
      }
      du = pair_ * logs.value();
    }
    if (!metropolis_accept(dk + da + du, cfg_.beta_s, u)) return;
    ens_.at(i, k) = q;
    energy_.kinetic += dk;
    energy_.trap += da;
    energy_.interaction += du;
    ++point_acc_;
  }

  void translate_move(std::size_t i) {
    ++trans_tries_;
    const std::size_t m = ens_.points();
    const Point2 d{rng_.symmetric(cfg_.step_translate), rng_.symmetric(cfg_.step_translate)};
    const double u = rng_();
    double da = 0.0;
    LogRatioSum logs;
    for (std::size_t k = 0; k < m; ++k) {
      const Point2 p = ens_.at(i, k);
      const Point2 q{p.x + d.x, p.y + d.y};
      da += norm2(q) - norm2(p);
      if (!ens_.model().interacting) continue;
      const auto section = ens_.cross_section(k);
      for (std::size_t j = 0; j < section.size(); ++j) {
        if (j == i) continue;
        const double d2new = dist2(q, section[j]);
        if (d2new < kMinPairDist2) return;
        logs.add(d2new / dist2(p, section[j]));
      }
    }
    da *= trap_;
    const double du = ens_.model().interacting ? pair_ * logs.value() : 0.0;
    if (!metropolis_accept(da + du, cfg_.beta_s, u)) return;
    for (std::size_t k = 0; k < m; ++k) {
      auto& p = ens_.at(i, k);
      p.x += d.x;
      p.y += d.y;
    }
    energy_.trap += da;
    energy_.interaction += du;
    ++trans_acc_;
  }

  FilamentEnsemble ens_;
  McConfig cfg_;
  Uniform01 rng_;
  double kin_ = 0.0, trap_ = 0.0, pair_ = 0.0;
  EnergyParts energy_;
  std::uint64_t point_tries_ = 0, point_acc_ = 0, trans_tries_ = 0, trans_acc_ = 0;
};

}  // namespace

FilamentEnsemble::FilamentEnsemble(std::size_t n_filaments, std::size_t n_points, double period,
                                   FilamentModel model)
    : n_(n_filaments), m_(n_points), period_(period), model_(model),
      pos_(n_filaments * n_points) {
  if (n_filaments < 1) throw std::invalid_argument("need at least one filament");
  if (n_points < 2) throw std::invalid_argument("need at least two points per filament");
  if (model.interacting && n_filaments < 2)
    throw std::invalid_argument("interacting runs need at least two filaments");
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
  if (!(model.gamma > 0.0) || !(model.epsilon > 0.0) || !(model.alpha > 0.0))
    throw std::invalid_argument("gamma, epsilon and alpha must be positive");
  if (!(model.mu_prime >= 0.0)) throw std::invalid_argument("mu_prime must be non-negative");
}

FilamentEnsemble FilamentEnsemble::straight_lattice(std::size_t n_filaments,
                                                    std::size_t n_points, double period,
                                                    FilamentModel model,
                                                    double mean_square_radius) {
  FilamentEnsemble ens(n_filaments, n_points, period, model);
  const int half = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_filaments)))) + 2;
  std::vector<Point2> sites;
  for (int j = -half; j <= half; ++j)
    for (int i = -half; i <= half; ++i)
      sites.push_back({i + 0.5 * j, j * std::numbers::sqrt3 / 2.0});
  std::stable_sort(sites.begin(), sites.end(), [](Point2 a, Point2 b) {
    const double ra = norm2(a), rb = norm2(b);
    if (std::abs(ra - rb) > 1e-9) return ra < rb;
    return std::atan2(a.y, a.x) < std::atan2(b.y, b.x);
  });
  sites.resize(n_filaments);
  double msr = 0.0;
  for (const auto& s : sites) msr += norm2(s);
  msr /= static_cast<double>(n_filaments);
  const double scale = msr > 0.0 ? std::sqrt(mean_square_radius / msr) : 1.0;
  for (std::size_t i = 0; i < n_filaments; ++i)
    for (std::size_t k = 0; k < n_points; ++k)
      ens.at(i, k) = {sites[i].x * scale, sites[i].y * scale};
  return ens;
}

EnergyParts discrete_energy(const FilamentEnsemble& ens) {
  const auto& m = ens.model();
  const double dtau = ens.dtau();
  const std::size_t n = ens.filaments(), mp = ens.points();
  EnergyParts e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < mp; ++k) {
      const Point2 p = ens.at(i, k);
      e.kinetic += dist2(ens.at(i, (k + 1) % mp), p);
      e.trap += norm2(p);
    }
  }
  e.kinetic *= m.alpha * m.gamma / (2.0 * dtau);
  e.trap *= m.mu_prime * m.gamma * dtau / 2.0;
  if (m.interacting) {
    double logs = 0.0;
    for (std::size_t k = 0; k < mp; ++k) {
      const auto section = ens.cross_section(k);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const double d2 = dist2(section[i], section[j]);
          if (d2 < kMinPairDist2)
            throw CoincidentPoints("filaments " + std::to_string(i) + " and " +
                                   std::to_string(j) + " coincide at point " + std::to_string(k));
          logs += 0.5 * std::log(d2);
        }
    }
    e.interaction = -(m.gamma * m.gamma / m.epsilon) * dtau * logs;
  }
  e.total = e.kinetic + e.trap + e.interaction;
  return e;
}

void validate(const McConfig& c) {
  std::vector<std::string> problems;
  if (!(c.beta_s > 0.0)) problems.emplace_back("beta_s must be positive");
  if (!(c.sweeps > c.burn_in)) problems.emplace_back("sweeps must exceed burn_in");
  if (!(c.step_point > 0.0)) problems.emplace_back("step_point must be positive");
  if (!(c.step_translate > 0.0)) problems.emplace_back("step_translate must be positive");
  if (c.histogram_bins < 1) problems.emplace_back("histogram_bins must be at least 1");
  if (!(c.histogram_rmax > 0.0)) problems.emplace_back("histogram_rmax must be positive");
  if (c.trace_stride < 1) problems.emplace_back("trace_stride must be at least 1");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

bool metropolis_accept(double delta_e, double beta, double uniform01) {
  if (delta_e <= 0.0) return true;
  return uniform01 < std::exp(-beta * delta_e);
}

std::uint64_t McObservables::histogram_mass() const {
  std::uint64_t total = overflow;
  for (auto c : histogram) total += c;
  return total;
}

double McObservables::radius_quantile(double q) const {
  const double target = q * static_cast<double>(histogram_mass());
  double cum = 0.0;
  for (std::size_t b = 0; b < histogram.size(); ++b) {
    const double c = static_cast<double>(histogram[b]);
    if (c > 0 && cum + c >= target) return bin_width * (b + (target - cum) / c);
    cum += c;
  }
  return bin_width * histogram.size();
}

std::string McObservables::trace_digest() const {
  std::ostringstream out;
  write_trace_csv(*this, out);
  return sha256_hex(out.str());
}

McObservables metropolis_run(FilamentEnsemble ensemble, const McConfig& config) {
  validate(config);
  if (ensemble.model().interacting) discrete_energy(ensemble);  // rejects coincident starts
  return Chain(std::move(ensemble), config).run();
}

McObservables run_chains(const FilamentEnsemble& initial, const McConfig& config,
                         unsigned chains) {
  validate(config);
  if (chains <= 1) return metropolis_run(initial, config);
  std::vector<McObservables> results(chains);
  {
    std::vector<std::jthread> pool;
    for (unsigned c = 0; c < chains; ++c) {
      pool.emplace_back([&, c] {
        McConfig cc = config;
        cc.seed = config.seed + c;
        results[c] = metropolis_run(initial, cc);
      });
    }
  }
  McObservables merged = results.front();
  merged.config = config;
  merged.seeds.clear();
  auto merge_estimate = [&](Estimate McObservables::*field) {
    double mean = 0.0, var = 0.0;
    for (const auto& r : results) {
      mean += (r.*field).mean;
      var += (r.*field).error * (r.*field).error;
    }
    return Estimate{mean / chains, std::sqrt(var) / chains};
  };
  merged.mean_square_radius = merge_estimate(&McObservables::mean_square_radius);
  merged.kinetic_per_filament = merge_estimate(&McObservables::kinetic_per_filament);
  merged.total_energy = merge_estimate(&McObservables::total_energy);
  std::fill(merged.histogram.begin(), merged.histogram.end(), 0);
  merged.overflow = 0;
  merged.samples = 0;
  double acc = 0, pacc = 0, tacc = 0;
  for (const auto& r : results) {
    merged.seeds.push_back(r.seeds.front());
    for (std::size_t b = 0; b < r.histogram.size(); ++b) merged.histogram[b] += r.histogram[b];
    merged.overflow += r.overflow;
    merged.samples += r.samples;
    acc += r.acceptance_rate;
    pacc += r.point_acceptance;
    tacc += r.translate_acceptance;
  }
  merged.acceptance_rate = acc / chains;
  merged.point_acceptance = pacc / chains;
  merged.translate_acceptance = tacc / chains;
  for (const auto& r : results) merged.energy_drift = std::max(merged.energy_drift, r.energy_drift);
  return merged;
}

McSetup mc_setup_from_config(const KeyValueConfig& cfg) {
  McSetup s;
  if (auto v = cfg.get_u64("n_filaments")) s.n_filaments = *v;
  if (auto v = cfg.get_u64("n_points")) s.n_points = *v;
  if (auto v = cfg.get_double("period")) s.period = *v;
  if (auto v = cfg.get_u64("chains")) s.chains = static_cast<unsigned>(*v);

  ModelParams mf = params_from_config(cfg);
  const double lambda = static_cast<double>(s.n_filaments) * mf.gamma;
  if (cfg.contains("lambda_total") && !close_rel(mf.lambda_total, lambda, 1e-12))
    throw ConfigError("lambda_total must equal n_filaments * gamma for Monte Carlo runs");
  mf.lambda_total = lambda;

  s.model.gamma = mf.gamma;
  s.model.epsilon = mf.epsilon;
  s.model.alpha = mf.alpha;
  if (auto v = cfg.get_bool("interacting")) s.model.interacting = *v;
  if (auto mp = cfg.get_double("mu_prime")) {
    s.model.mu_prime = *mp;
    const double implied = mu_from_mu_prime(*mp, mf);
    if (cfg.contains("mu") && !close_rel(implied, mf.mu, 1e-9))
      throw ConfigError("mu and mu_prime are inconsistent for lambda_total = n_filaments * gamma");
    mf.mu = implied;
  } else {
    s.model.mu_prime = mu_prime_from_mu(mf.mu, mf);
  }
  s.meanfield = validate(mf);

  if (auto v = cfg.get_double("beta_s")) s.config.beta_s = *v;
  if (auto v = cfg.get_u64("sweeps")) s.config.sweeps = *v;
  if (auto v = cfg.get_u64("burn_in")) s.config.burn_in = *v;
  if (auto v = cfg.get_double("step_point")) s.config.step_point = *v;
  if (auto v = cfg.get_double("step_translate")) s.config.step_translate = *v;
  if (auto v = cfg.get_u64("seed")) s.config.seed = *v;
  if (auto v = cfg.get_u64("histogram_bins")) s.config.histogram_bins = *v;
  if (auto v = cfg.get_double("histogram_rmax")) s.config.histogram_rmax = *v;
  if (auto v = cfg.get_u64("trace_stride")) s.config.trace_stride = *v;
  if (auto v = cfg.get_u64("batches")) s.config.batches = *v;
  validate(s.config);

  s.init_mean_square_radius = mf.radius * mf.radius / 2.0;
  if (auto v = cfg.get_double("init_msr")) s.init_mean_square_radius = *v;
  return s;
}

FilamentEnsemble initial_ensemble(const McSetup& s) {
  return FilamentEnsemble::straight_lattice(s.n_filaments, s.n_points, s.period, s.model,
                                            s.init_mean_square_radius);
}

MeanFieldMapping meanfield_mapping(const McObservables& obs, const ModelParams& params) {
  ModelParams p = params;
  p.gamma = obs.model.gamma;
  p.epsilon = obs.model.epsilon;
  p.lambda_total = static_cast<double>(obs.n_filaments) * obs.model.gamma;
  MeanFieldMapping m;
  m.mu = mu_from_mu_prime(obs.model.mu_prime, p);
  m.beta = obs.model.gamma * obs.config.beta_s * obs.period;
  m.z = std::sqrt(2.0 * p.lambda_total * m.beta / p.epsilon);
  return m;
}

void check_mapping(const McObservables& obs, const ConsistentState& state,
                   const ModelParams& params) {
  std::vector<std::string> problems;
  const double lambda = static_cast<double>(obs.n_filaments) * obs.model.gamma;
  if (!close_rel(params.lambda_total, lambda, 1e-6))
    problems.push_back("lambda_total " + format_double(params.lambda_total) +
                       " != n_filaments * gamma = " + format_double(lambda));
  if (!close_rel(params.gamma, obs.model.gamma, 1e-6)) problems.emplace_back("gamma differs");
  if (!close_rel(params.epsilon, obs.model.epsilon, 1e-6))
    problems.emplace_back("epsilon differs");
  if (!obs.model.interacting) problems.emplace_back("run has interactions switched off");
  if (problems.empty()) {
    const double mu = mu_from_mu_prime(obs.model.mu_prime, params);
    if (!(mu == state.mu || close_rel(mu, state.mu, 1e-6)))
      problems.push_back("mu' = " + format_double(obs.model.mu_prime) + " maps to mu = " +
                         format_double(mu) + ", state has mu = " + format_double(state.mu));
    const double beta_run = obs.model.gamma * obs.config.beta_s * obs.period;
    const double beta_state = beta_of(state, params);
    if (!close_rel(beta_run, beta_state, 1e-6))
      problems.push_back("gamma * beta_s * period = " + format_double(beta_run) +
                         " differs from mean-field beta = " + format_double(beta_state));
  }
  if (!problems.empty()) {
    std::string msg = "Monte Carlo run does not map onto the mean-field state:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw MismatchedParameters(msg);
  }
}

double normalized_l1(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("histograms differ in length");
  double sp = 0.0, sq = 0.0;
  for (double x : p) sp += x;
  for (double x : q) sq += x;
  if (!(sp > 0.0) || !(sq > 0.0)) throw std::invalid_argument("histogram has no mass");
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) l1 += std::abs(p[i] / sp - q[i] / sq);
  return l1;
}

Comparison compare_to_meanfield(const McObservables& obs, const ConsistentState& state,
                                const ModelParams& params) {
  check_mapping(obs, state, params);
  const double r_edge = params.radius;
  std::size_t bins = static_cast<std::size_t>(std::floor(r_edge / obs.bin_width * (1 + 1e-12)));
  bins = std::min(bins, obs.histogram.size());
  if (bins == 0) throw std::invalid_argument("histogram bins are wider than the radius R");

  std::vector<double> mc(bins), mf(bins);
  double inside = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    mc[b] = static_cast<double>(obs.histogram[b]);
    inside += mc[b];
    // int rho r dr over the bin, 4 Simpson panels are plenty for a smooth profile
    const double lo = b * obs.bin_width, hi = (b + 1) * obs.bin_width;
    constexpr int panels = 16;
    double acc = 0.0;
    for (int s = 0; s <= panels; ++s) {
      const double r = lo + (hi - lo) * s / panels;
      const double w = (s == 0 || s == panels) ? 1.0 : (s % 2 ? 4.0 : 2.0);
      acc += w * density_at(state, params, std::min(r, r_edge)) * r;
    }
    mf[b] = acc * (hi - lo) / (3.0 * panels);
  }
  Comparison c;
  c.bins_used = bins;
  c.l1 = normalized_l1(mc, mf);
  c.mc_mean_square_radius = obs.mean_square_radius.mean;
  c.mf_mean_square_radius = mean_square_radius(state, params);
  c.moment_ratio = c.mc_mean_square_radius / c.mf_mean_square_radius;
  const double mass = static_cast<double>(obs.histogram_mass());
  c.fraction_outside = (mass - inside) / mass;
  return c;
}

void write_histogram_csv(const McObservables& obs, std::ostream& out) {
  // density: mean number of filaments per unit cross-section area
  out << "# qvortex mc-histogram v1 samples=" << obs.samples << " overflow=" << obs.overflow
      << "\n";
  out << "bin_left,bin_right,count,density\n";
  const double norm = static_cast<double>(obs.samples) * static_cast<double>(obs.n_points);
  for (std::size_t b = 0; b < obs.histogram.size(); ++b) {
    const double lo = b * obs.bin_width, hi = (b + 1) * obs.bin_width;
    const double area = std::numbers::pi * (hi * hi - lo * lo);
    const double density = norm > 0 ? static_cast<double>(obs.histogram[b]) / (norm * area) : 0.0;
    out << format_double(lo) << ',' << format_double(hi) << ',' << obs.histogram[b] << ','
        << format_double(density) << '\n';
  }
}

void write_trace_csv(const McObservables& obs, std::ostream& out) {
  out << "# qvortex mc-trace v1\n";
  out << "sweep,K,A,U,total\n";
  for (std::size_t t = 0; t < obs.energy_trace.size(); ++t) {
    const auto& e = obs.energy_trace[t];
    out << obs.trace_sweep[t] << ',' << format_double(e.kinetic) << ',' << format_double(e.trap)
        << ',' << format_double(e.interaction) << ',' << format_double(e.total) << '\n';
  }
}

std::string mc_summary_json(const McObservables& obs) {
  using nlohmann::json;
  auto est = [](const Estimate& e) { return json{{"mean", e.mean}, {"error", e.error}}; };
  json j;
  j["schema"] = "qvortex mc-summary v1";
  j["n_filaments"] = obs.n_filaments;
  j["n_points"] = obs.n_points;
  j["period"] = obs.period;
  j["model"] = {{"gamma", obs.model.gamma},
                {"epsilon", obs.model.epsilon},
                {"alpha", obs.model.alpha},
                {"mu_prime", obs.model.mu_prime},
                {"interacting", obs.model.interacting}};
  j["config"] = {{"beta_s", obs.config.beta_s},
                 {"sweeps", obs.config.sweeps},
                 {"burn_in", obs.config.burn_in},
                 {"step_point", obs.config.step_point},
                 {"step_translate", obs.config.step_translate},
                 {"seed", obs.config.seed},
                 {"histogram_bins", obs.config.histogram_bins},
                 {"histogram_rmax", obs.config.histogram_rmax},
                 {"trace_stride", obs.config.trace_stride},
                 {"batches", obs.config.batches}};
  j["seeds"] = obs.seeds;
  j["samples"] = obs.samples;
  j["acceptance_rate"] = obs.acceptance_rate;
  j["point_acceptance"] = obs.point_acceptance;
  j["translate_acceptance"] = obs.translate_acceptance;
  j["energy_drift"] = obs.energy_drift;
  j["kinetic_per_filament"] = est(obs.kinetic_per_filament);
  j["equipartition_kinetic_per_filament"] =
      static_cast<double>(obs.n_points - 1) / obs.config.beta_s;
  j["mean_square_radius"] = est(obs.mean_square_radius);
  j["total_energy"] = est(obs.total_energy);
  j["radius_q99"] = obs.radius_quantile(0.99);
  j["histogram"] = {{"bin_width", obs.bin_width},
                    {"counts", obs.histogram},
                    {"overflow", obs.overflow}};
  j["trace_digest"] = obs.trace_digest();
  return j.dump(2) + "\n";
}

McObservables mc_summary_from_json(const std::string& text) {
  using nlohmann::json;
  McObservables obs;
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != "qvortex mc-summary v1")
      throw std::invalid_argument("unsupported summary schema");
    obs.n_filaments = j.at("n_filaments").get<std::size_t>();
    obs.n_points = j.at("n_points").get<std::size_t>();
    obs.period = j.at("period").get<double>();
    const auto& m = j.at("model");
    obs.model.gamma = m.at("gamma").get<double>();
    obs.model.epsilon = m.at("epsilon").get<double>();
    obs.model.alpha = m.at("alpha").get<double>();
    obs.model.mu_prime = m.at("mu_prime").get<double>();
    obs.model.interacting = m.at("interacting").get<bool>();
    const auto& c = j.at("config");
    obs.config.beta_s = c.at("beta_s").get<double>();
    obs.config.sweeps = c.at("sweeps").get<std::uint64_t>();
    obs.config.burn_in = c.at("burn_in").get<std::uint64_t>();
    obs.config.step_point = c.at("step_point").get<double>();
    obs.config.step_translate = c.at("step_translate").get<double>();
    obs.config.seed = c.at("seed").get<std::uint64_t>();
    obs.config.histogram_bins = c.at("histogram_bins").get<std::size_t>();
    obs.config.histogram_rmax = c.at("histogram_rmax").get<double>();
    obs.config.trace_stride = c.at("trace_stride").get<std::uint64_t>();
    obs.config.batches = c.at("batches").get<std::size_t>();
    obs.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    obs.samples = j.at("samples").get<std::uint64_t>();
    obs.acceptance_rate = j.at("acceptance_rate").get<double>();
    obs.point_acceptance = j.at("point_acceptance").get<double>();
    obs.translate_acceptance = j.at("translate_acceptance").get<double>();
    obs.energy_drift = j.value("energy_drift", 0.0);
    auto est = [](const json& e) { return Estimate{e.at("mean").get<double>(), e.at("error").get<double>()}; };
    obs.kinetic_per_filament = est(j.at("kinetic_per_filament"));
    obs.mean_square_radius = est(j.at("mean_square_radius"));
    obs.total_energy = est(j.at("total_energy"));
    const auto& h = j.at("histogram");
    obs.bin_width = h.at("bin_width").get<double>();
    obs.histogram = h.at("counts").get<std::vector<std::uint64_t>>();
    obs.overflow = h.at("overflow").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed Monte Carlo summary: ") + e.what());
  }
  return obs;
}

}  // namespace qvortex
