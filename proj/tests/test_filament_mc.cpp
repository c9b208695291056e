#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles/closed_forms.hpp"
#include "qvortex/filament_mc.hpp"
#include "qvortex/thermo.hpp"

using namespace qvortex;

namespace {

FilamentModel free_model(double mu_prime) {
  FilamentModel m;
  m.mu_prime = mu_prime;
  m.interacting = false;
  return m;
}

FilamentEnsemble random_ensemble(std::size_t n, std::size_t m, double period, FilamentModel model,
                                 std::uint64_t seed) {
  FilamentEnsemble e(n, m, period, model);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < m; ++k) e.at(i, k) = {u(rng), u(rng)};
  return e;
}

McConfig short_config(std::uint64_t seed) {
  McConfig c;
  c.beta_s = 2.0;
  c.sweeps = 300;
  c.burn_in = 100;
  c.step_point = 0.2;
  c.step_translate = 0.2;
  c.seed = seed;
  c.histogram_bins = 20;
  c.histogram_rmax = 2.0;
  c.batches = 10;
  return c;
}

// Dense-matrix version of the chain covariance, independent of the circulant formula.
double chain_mean_square_dense(std::size_t m, double period, double alpha, double gamma,
                               double mu_prime, double beta) {
  const double dtau = period / static_cast<double>(m);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    const double c = alpha * gamma / dtau;
    k(i, i) += c;
    k(j, j) += c;
    k(i, j) -= c;
    k(j, i) -= c;
    k(i, i) += mu_prime * gamma * dtau;
  }
  const Eigen::MatrixXd cov = k.inverse() / beta;
  return 2.0 * cov.trace() / static_cast<double>(m);
}

}  // namespace

TEST_CASE("two straight filaments at distance d: K = 0, U = -ln d") {
  FilamentModel model;
  FilamentEnsemble e(2, 8, 1.0, model);
  const double d = 0.37;
  for (std::size_t k = 0; k < 8; ++k) {
    e.at(0, k) = {0.1, -0.2};
    e.at(1, k) = {0.1 + d, -0.2};
  }
  const auto en = discrete_energy(e);
  CHECK(en.kinetic == 0.0);
  CHECK(en.interaction == doctest::Approx(-std::log(d)).epsilon(1e-14));
  CHECK(en.total == doctest::Approx(en.kinetic + en.trap + en.interaction));

  for (std::size_t k = 0; k < 8; ++k) e.at(1, k) = {1.1, -0.2};
  CHECK(std::abs(discrete_energy(e).interaction) <= 1e-15);
}

TEST_CASE("single untrapped filament has only kinetic energy") {
  auto e = random_ensemble(1, 10, 2.0, free_model(0.0), 5);
  const auto en = discrete_energy(e);
  CHECK(en.trap == 0.0);
  CHECK(en.interaction == 0.0);
  CHECK(en.total == en.kinetic);
  double k = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto a = e.at(0, i), b = e.at(0, (i + 1) % 10);
    k += (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
  }
  CHECK(en.kinetic == doctest::Approx(k / (2.0 * 0.2)));
}

TEST_CASE("coincident cross-section points are rejected") {
  FilamentModel model;
  FilamentEnsemble e(2, 4, 1.0, model);
  CHECK_THROWS_AS(discrete_energy(e), CoincidentPoints);
  CHECK_THROWS_AS(metropolis_run(e, short_config(1)), CoincidentPoints);
}

TEST_CASE("ensemble invariants") {
  FilamentModel model;
  CHECK_THROWS_AS(FilamentEnsemble(1, 4, 1.0, model), std::invalid_argument);
  CHECK_THROWS_AS(FilamentEnsemble(2, 1, 1.0, model), std::invalid_argument);
  CHECK_THROWS_AS(FilamentEnsemble(2, 4, 0.0, model), std::invalid_argument);
  CHECK_NOTHROW(FilamentEnsemble(1, 4, 1.0, free_model(1.0)));
  const auto lat = FilamentEnsemble::straight_lattice(19, 4, 1.0, model, 0.5);
  double msr = 0.0;
  for (const auto& p : lat.cross_section(2)) msr += p.x * p.x + p.y * p.y;
  CHECK(msr / 19 == doctest::Approx(0.5));
  CHECK(discrete_energy(lat).kinetic == 0.0);
}

TEST_CASE("K >= 0 and A >= 0; K and U are translation invariant") {
  FilamentModel model;
  model.mu_prime = 3.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto e = random_ensemble(5, 6, 0.7, model, seed);
    const auto before = discrete_energy(e);
    CHECK(before.kinetic >= 0.0);
    CHECK(before.trap >= 0.0);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t k = 0; k < 6; ++k) {
        e.at(i, k).x += 0.3125;
        e.at(i, k).y -= 1.5;
      }
    const auto after = discrete_energy(e);
    CHECK(after.kinetic == doctest::Approx(before.kinetic).epsilon(1e-13));
    CHECK(after.interaction == doctest::Approx(before.interaction).epsilon(1e-12));
    CHECK(after.trap != doctest::Approx(before.trap));
  }
}

TEST_CASE("metropolis rule") {
  CHECK(metropolis_accept(-1.0, 1.0, 0.999999));
  CHECK(metropolis_accept(0.0, 1.0, 0.999999));
  CHECK(metropolis_accept(1.0, 1.0, std::exp(-1.0) - 1e-12));
  CHECK_FALSE(metropolis_accept(1.0, 1.0, std::exp(-1.0) + 1e-12));
}

TEST_CASE("two-state projection: transition frequencies follow Metropolis ratios") {
  // A single point restricted to two positions with energies 0 and dE.
  const double beta = 1.3, dE = 0.8;
  std::mt19937_64 rng(99);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  int state = 0;
  std::uint64_t tries_up = 0, up = 0, tries_down = 0, down = 0, time_in_1 = 0;
  const std::uint64_t steps = 400000;
  for (std::uint64_t t = 0; t < steps; ++t) {
    const double delta = state == 0 ? dE : -dE;
    const bool acc = metropolis_accept(delta, beta, uniform());
    (state == 0 ? tries_up : tries_down)++;
    if (acc) {
      (state == 0 ? up : down)++;
      state = 1 - state;
    }
    time_in_1 += state;
  }
  const double p_up = std::exp(-beta * dE);
  const double f_up = double(up) / double(tries_up);
  const double sigma = std::sqrt(p_up * (1 - p_up) / double(tries_up));
  CHECK(std::abs(f_up - p_up) <= 3 * sigma);
  CHECK(down == tries_down);
  // stationary occupation p1 = e^{-beta dE} / (1 + e^{-beta dE}); crude bound
  const double p1 = p_up / (1 + p_up);
  CHECK(double(time_in_1) / steps == doctest::Approx(p1).epsilon(0.02));
}

TEST_CASE("same seed gives bit-identical traces; another seed does not") {
  FilamentModel model;
  model.mu_prime = 2.0;
  const auto init = FilamentEnsemble::straight_lattice(6, 5, 1.0, model, 0.5);
  const auto a = metropolis_run(init, short_config(17));
  const auto b = metropolis_run(init, short_config(17));
  const auto c = metropolis_run(init, short_config(18));
  REQUIRE(a.energy_trace.size() == b.energy_trace.size());
  for (std::size_t t = 0; t < a.energy_trace.size(); ++t) {
    CHECK(a.energy_trace[t].total == b.energy_trace[t].total);
    CHECK(a.energy_trace[t].kinetic == b.energy_trace[t].kinetic);
  }
  CHECK(a.trace_digest() == b.trace_digest());
  CHECK(a.trace_digest() != c.trace_digest());
}

TEST_CASE("observable bookkeeping") {
  FilamentModel model;
  model.mu_prime = 2.0;
  const auto init = FilamentEnsemble::straight_lattice(6, 5, 1.0, model, 0.5);
  auto cfg = short_config(3);
  cfg.sweeps = 2500;
  cfg.burn_in = 500;
  cfg.trace_stride = 7;
  const auto o = metropolis_run(init, cfg);
  CHECK(o.samples == 2000);
  CHECK(o.histogram_mass() == 6u * 5u * 2000u);
  CHECK(o.acceptance_rate > 0.0);
  CHECK(o.acceptance_rate < 1.0);
  CHECK(o.trace_sweep.front() == 0);
  CHECK(o.trace_sweep[1] == 7);
  CHECK(o.energy_trace.size() == (2500 + 6) / 7);
  for (const auto& e : o.energy_trace) {
    CHECK(e.kinetic >= -1e-9);
    CHECK(e.trap >= -1e-9);
    CHECK(e.total == doctest::Approx(e.kinetic + e.trap + e.interaction));
  }
  // incremental updates agree with full recomputation
  CHECK(o.energy_drift <= 1e-9 * std::max(1.0, std::abs(o.total_energy.mean)));
  CHECK(o.radius_quantile(0.0) == 0.0);
  CHECK(o.radius_quantile(0.5) < o.radius_quantile(0.99));
}

TEST_CASE("config validation") {
  McConfig c;
  CHECK_NOTHROW(validate(c));
  c.burn_in = c.sweeps;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = McConfig{};
  c.beta_s = 0;
  c.step_point = -1;
  try {
    validate(c);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.problems().size() == 2);
  }
}

TEST_CASE("cold trapped filaments collapse toward the axis") {
  const auto init = FilamentEnsemble::straight_lattice(1, 8, 1.0, free_model(4.0), 1.0);
  double previous = 1e300;
  for (double beta : {1.0, 10.0, 100.0, 1000.0}) {
    auto cfg = short_config(5);
    cfg.beta_s = beta;
    cfg.sweeps = 4000;
    cfg.burn_in = 1000;
    cfg.step_point = 0.5 / std::sqrt(beta);
    cfg.step_translate = 1.0 / std::sqrt(beta);
    const auto o = metropolis_run(init, cfg);
    CHECK(o.mean_square_radius.mean < previous);
    previous = o.mean_square_radius.mean;
  }
  CHECK(previous < 1e-2);
}

TEST_CASE("Gaussian chain oracle: circulant formula equals dense inverse") {
  for (std::size_t m : {2u, 3u, 8u, 16u}) {
    for (double period : {0.01, 1.0, 3.0}) {
      CAPTURE(m);
      CAPTURE(period);
      const double exact = oracle::gaussian_chain_mean_square(m, period, 1.3, 0.7, 2.0, 4.0);
      const double dense = chain_mean_square_dense(m, period, 1.3, 0.7, 2.0, 4.0);
      // dense inversion loses digits in proportion to the condition number
      const double dtau = period / m;
      const double cond = (4.0 * 1.3 / dtau + 2.0 * dtau) / (2.0 * dtau);
      CHECK(exact == doctest::Approx(dense).epsilon(std::max(1e-12, 1e-15 * cond)));
    }
  }
}

TEST_CASE("non-interacting trapped filament matches the Gaussian chain") {
  const auto setup = mc_setup_from_config(
      KeyValueConfig::load(std::string(QVORTEX_SOURCE_DIR) + "/configs/mc_free_chain.conf"));
  auto cfg = setup.config;
  cfg.sweeps = 41000;  // shorter than the shipped config
  const auto o = metropolis_run(initial_ensemble(setup), cfg);
  const double expect = oracle::gaussian_chain_mean_square(
      setup.n_points, setup.period, setup.model.alpha, setup.model.gamma, setup.model.mu_prime,
      cfg.beta_s);
  CAPTURE(o.mean_square_radius.mean);
  CAPTURE(o.mean_square_radius.error);
  CAPTURE(expect);
  CHECK(o.point_acceptance > 0.2);
  CHECK(o.point_acceptance < 0.6);
  CHECK(o.translate_acceptance > 0.2);
  CHECK(o.translate_acceptance < 0.6);
  CHECK(std::abs(o.mean_square_radius.mean - expect) <= 3 * o.mean_square_radius.error);
  // the trap takes a share of each internal mode, so K sits below (M-1)/beta_s
  const double k_expect = oracle::gaussian_chain_kinetic(
      setup.n_points, setup.period, setup.model.alpha, setup.model.gamma, setup.model.mu_prime,
      cfg.beta_s);
  CAPTURE(k_expect);
  CHECK(std::abs(o.kinetic_per_filament.mean - k_expect) <= 3 * o.kinetic_per_filament.error);
}

TEST_CASE("small interacting run: kinetic equipartition") {
  FilamentModel model;
  model.mu_prime = 16.0;
  const auto init = FilamentEnsemble::straight_lattice(8, 8, 0.01, model, 0.5);
  McConfig cfg;
  cfg.beta_s = 400;
  cfg.sweeps = 22000;
  cfg.burn_in = 2000;
  cfg.step_point = 0.003;
  cfg.step_translate = 0.2;
  cfg.seed = 4;
  const auto o = metropolis_run(init, cfg);
  CAPTURE(o.kinetic_per_filament.mean);
  CAPTURE(o.kinetic_per_filament.error);
  CHECK(std::abs(o.kinetic_per_filament.mean - 7.0 / 400) <= 3 * o.kinetic_per_filament.error);
}

TEST_CASE("chains merge histograms and keep distinct seeds") {
  FilamentModel model;
  model.mu_prime = 2.0;
  const auto init = FilamentEnsemble::straight_lattice(4, 4, 1.0, model, 0.5);
  const auto o = run_chains(init, short_config(10), 3);
  CHECK(o.seeds == std::vector<std::uint64_t>{10, 11, 12});
  CHECK(o.samples == 3 * 200);
  CHECK(o.histogram_mass() == 3u * 4u * 4u * 200u);
  const auto single = metropolis_run(init, short_config(10));
  CHECK(o.trace_digest() == single.trace_digest());
}

TEST_CASE("normalized L1") {
  const std::vector<double> p = {1, 2, 3, 4};
  const std::vector<double> q = {10, 20, 30, 40};
  CHECK(normalized_l1(p, p) == 0.0);
  CHECK(normalized_l1(p, q) == doctest::Approx(0.0).epsilon(1e-15));
  const std::vector<double> r = {1, 0, 0, 0}, s = {0, 0, 0, 1};
  CHECK(normalized_l1(r, s) == 2.0);
  const std::vector<double> shorter = {1, 2};
  CHECK_THROWS_AS(normalized_l1(p, shorter), std::invalid_argument);
}

TEST_CASE("setup from config: mu and mu' mapping, Lambda = N Gamma") {
  std::istringstream in(
      "n_filaments = 32\nn_points = 16\nperiod = 0.01\nmu = 0.5\nradius = 1\nbeta_s = 400\n");
  const auto s = mc_setup_from_config(KeyValueConfig::parse(in));
  CHECK(s.meanfield.lambda_total == 32.0);
  CHECK(s.model.mu_prime == doctest::Approx(32.0));
  CHECK(s.init_mean_square_radius == 0.5);

  std::istringstream both("n_filaments = 4\nmu = 0.5\nmu_prime = 3\n");
  CHECK_THROWS_AS(mc_setup_from_config(KeyValueConfig::parse(both)), ConfigError);
  std::istringstream lam("n_filaments = 4\nlambda_total = 5\n");
  CHECK_THROWS_AS(mc_setup_from_config(KeyValueConfig::parse(lam)), ConfigError);
  std::istringstream prime("n_filaments = 4\nmu_prime = 4\nradius = 2\n");
  CHECK(mc_setup_from_config(KeyValueConfig::parse(prime)).meanfield.mu == doctest::Approx(2.0));
}

TEST_CASE("mapping onto mean-field parameters") {
  std::istringstream in(
      "n_filaments = 4\nn_points = 4\nperiod = 0.5\nmu = 0.5\nbeta_s = 3\nsweeps = 200\nburn_in = 100\n"
      "step_point = 0.1\nstep_translate = 0.1\n");
  const auto setup = mc_setup_from_config(KeyValueConfig::parse(in));
  const auto o = metropolis_run(initial_ensemble(setup), setup.config);
  const auto m = meanfield_mapping(o, setup.meanfield);
  CHECK(m.mu == doctest::Approx(0.5));
  CHECK(m.beta == doctest::Approx(1.5));
  CHECK(m.z == doctest::Approx(std::sqrt(2 * 4 * 1.5)));

  const auto state = solve_state(m.mu, m.z, 1e-10);
  CHECK_NOTHROW(check_mapping(o, state, setup.meanfield));
  CHECK_THROWS_AS(check_mapping(o, solve_state(0.75, m.z, 1e-10), setup.meanfield),
                  MismatchedParameters);
  CHECK_THROWS_AS(check_mapping(o, solve_state(0.5, 2 * m.z, 1e-10), setup.meanfield),
                  MismatchedParameters);
  ModelParams wrong = setup.meanfield;
  wrong.lambda_total = 5;
  CHECK_THROWS_AS(check_mapping(o, state, wrong), MismatchedParameters);
}

TEST_CASE("trap-off run against a confined state is a mismatch") {
  const auto setup = mc_setup_from_config(
      KeyValueConfig::load(std::string(QVORTEX_SOURCE_DIR) + "/configs/mc_trap_off.conf"));
  auto cfg = setup.config;
  cfg.sweeps = 300;
  cfg.burn_in = 100;
  const auto o = metropolis_run(initial_ensemble(setup), cfg);
  ModelParams p = setup.meanfield;
  p.mu = 0.5;
  CHECK_THROWS_AS(compare_to_meanfield(o, solve_state(0.5, 16.0, 1e-10), p), MismatchedParameters);
}

TEST_CASE("summary JSON round-trips") {
  FilamentModel model;
  model.mu_prime = 2.0;
  const auto init = FilamentEnsemble::straight_lattice(4, 4, 1.0, model, 0.5);
  const auto o = metropolis_run(init, short_config(21));
  const auto back = mc_summary_from_json(mc_summary_json(o));
  CHECK(back.histogram == o.histogram);
  CHECK(back.overflow == o.overflow);
  CHECK(back.samples == o.samples);
  CHECK(back.mean_square_radius.mean == o.mean_square_radius.mean);
  CHECK(back.kinetic_per_filament.error == o.kinetic_per_filament.error);
  CHECK(back.model.mu_prime == o.model.mu_prime);
  CHECK(back.config.seed == o.config.seed);
  CHECK(back.config.step_point == o.config.step_point);
  CHECK(back.n_filaments == 4);
  CHECK(back.period == 1.0);
  CHECK_THROWS_AS(mc_summary_from_json("{\"schema\": 1}"), std::invalid_argument);
  CHECK_THROWS_AS(mc_summary_from_json("not json"), std::invalid_argument);
}

TEST_CASE("histogram CSV: header, one row per bin, densities integrate to N") {
  FilamentModel model;
  model.mu_prime = 2.0;
  const auto init = FilamentEnsemble::straight_lattice(4, 4, 1.0, model, 0.5);
  auto cfg = short_config(2);
  cfg.histogram_rmax = 5.0;
  const auto o = metropolis_run(init, cfg);
  std::ostringstream out;
  write_histogram_csv(o, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# qvortex mc-histogram v1", 0) == 0);
  std::getline(in, line);
  CHECK(line == "bin_left,bin_right,count,density");
  double filaments = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    double lo, hi, count, density;
    char c;
    std::istringstream row(line);
    row >> lo >> c >> hi >> c >> count >> c >> density;
    filaments += density * oracle::pi * (hi * hi - lo * lo);
    ++rows;
  }
  CHECK(rows == 20);
  CHECK(o.overflow == 0);
  CHECK(filaments == doctest::Approx(4.0).epsilon(1e-9));
}
