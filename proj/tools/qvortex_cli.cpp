// qvortex command-line tool. Talks to the library only through qvortex.h.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qvortex/qvortex.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(qv_status s) {
  return (s == QV_ERR_VALIDATION || s == QV_ERR_CONFIG) ? kExitUsage : kExitDomain;
}

void check(qv_status s, const std::string& what) {
  if (s != QV_OK)
    throw Failure{exit_code_for(s), what + ": " + qv_last_error() + " [" + qv_status_name(s) + "]"};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  qv_string_free(s);
  return out;
}

template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  ~Handle() { Destroy(p); }
};
using Params = Handle<qv_params, qv_params_destroy>;
using State = Handle<qv_state, qv_state_destroy>;
using Sweep = Handle<qv_sweep, qv_sweep_destroy>;
using McSetup = Handle<qv_mc_setup, qv_mc_setup_destroy>;
using McResult = Handle<qv_mc_result, qv_mc_result_destroy>;

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Accumulates what a run did and writes manifest.json next to its outputs.
class Manifest {
 public:
  Manifest(std::string command, int argc, char** argv) : started_(utc_now()) {
    doc_["tool"] = "qvortex";
    doc_["version"] = qv_version();
    doc_["command"] = std::move(command);
    std::vector<std::string> args(argv, argv + argc);
    doc_["cmdline"] = args;
    doc_["parameters"] = json::object();
    doc_["tolerances"] = json::object();
    doc_["seeds"] = json::array();
  }
  json& operator[](const std::string& key) { return doc_[key]; }
  void add_output(const fs::path& file) { outputs_.push_back(file); }

  void write(const fs::path& dir) {
    doc_["started"] = started_;
    doc_["finished"] = utc_now();
    json digests = json::object();
    for (const auto& f : outputs_) {
      char* hex = nullptr;
      check(qv_sha256_file(f.c_str(), &hex), "digest of " + f.string());
      digests[f.filename().string()] = take(hex);
    }
    doc_["outputs"] = digests;
    const std::string text = doc_.dump(2) + "\n";
    const fs::path path = dir / "manifest.json";
    check(qv_write_file(path.c_str(), text.data(), text.size()), "writing manifest");
  }

 private:
  json doc_;
  std::string started_;
  std::vector<fs::path> outputs_;
};

fs::path output_dir(const std::string& flag) {
  std::string dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv("QVORTEX_OUT_DIR");
    dir = env && *env ? env : ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitUsage, "--out: cannot create directory " + dir + ": " + ec.message()};
  return dir;
}

Params load_params(const std::string& config) {
  Params p;
  if (config.empty())
    check(qv_params_create(&p.p), "creating parameters");
  else
    check(qv_params_load(config.c_str(), &p.p), "--config " + config);
  return p;
}

json params_json(const qv_params* p) {
  json j;
  for (const char* name : {"lambda_total", "epsilon", "gamma", "alpha", "radius", "mu"}) {
    double v = 0.0;
    qv_params_get(p, name, &v);
    j[name] = v;
  }
  return j;
}

json thermo_json(const qv_thermo& t) {
  return {{"mu", t.mu},         {"z", t.z},
          {"a", t.a},           {"beta", t.beta},
          {"T", t.temperature}, {"E", t.energy},
          {"rho0", t.rho0},     {"p", t.pressure},
          {"S", t.entropy},     {"regime", qv_regime_name(t.regime)},
          {"residual", t.residual}};
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(10);
  s << x;
  return s.str();
}

struct Common {
  std::string config;
  std::string out;
  double tol = 1e-10;
};

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  Common c;
  double mu = 0.0, z = 0.0;
  std::string format = "csv";
};

int cmd_solve(const SolveArgs& a, Manifest& m) {
  Params p = load_params(a.c.config);
  const fs::path dir = output_dir(a.c.out);
  State s;
  check(qv_solve(p.p, a.mu, a.z, a.c.tol, &s.p), "solve");
  qv_thermo t{};
  check(qv_state_thermo(s.p, &t), "thermo");

  fs::path file = dir / (a.format == "json" ? "thermo.json" : "thermo.csv");
  if (a.format == "json") {
    char* text = nullptr;
    check(qv_state_thermo_json(s.p, &text), "json");
    const std::string body = take(text);
    check(qv_write_file(file.c_str(), body.data(), body.size()), "writing " + file.string());
  } else {
    check(qv_state_thermo_csv(s.p, file.c_str()), "writing " + file.string());
  }
  std::cout << "mu=" << fmt(t.mu) << " z=" << fmt(t.z) << " a=" << fmt(t.a)
            << " beta=" << fmt(t.beta) << " E=" << fmt(t.energy) << " rho0=" << fmt(t.rho0)
            << " p=" << fmt(t.pressure) << " S=" << fmt(t.entropy)
            << " regime=" << qv_regime_name(t.regime) << "\n";
  if (t.multiple_roots) std::cout << "note: several self-consistent roots; reporting the first\n";

  m.add_output(file);
  m["parameters"] = params_json(p.p);
  m["parameters"]["mu"] = a.mu;
  m["parameters"]["z"] = a.z;
  m["tolerances"]["self_consistency"] = a.c.tol;
  m["result"] = thermo_json(t);
  m.write(dir);
  return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  Common c;
  std::vector<double> mu;
  double z_min = 0.5, z_max = 3.0;
  std::size_t n = 26;
  bool plot = false;
  unsigned threads = 1;
};

std::string interval_text(const qv_sweep* s) {
  const std::size_t count = qv_sweep_metastable_count(s);
  if (count == 0) return "none";
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    double lo = 0, hi = 0;
    qv_sweep_metastable(s, i, &lo, &hi);
    if (i) out += ' ';
    out += '[' + fmt(lo) + ',' + fmt(hi) + ']';
  }
  return out;
}

int cmd_sweep(const SweepArgs& a, Manifest& m) {
  Params p = load_params(a.c.config);
  const fs::path dir = output_dir(a.c.out);
  const fs::path csv = dir / "sweep.csv";
  std::vector<Sweep> sweeps;
  json summary = json::array();
  for (std::size_t k = 0; k < a.mu.size(); ++k) {
    Sweep s;
    check(qv_sweep_run(p.p, a.mu[k], a.z_min, a.z_max, a.n, a.c.tol, a.threads, &s.p),
          "sweep mu=" + fmt(a.mu[k]));
    check(qv_sweep_csv(s.p, csv.c_str(), k > 0), "writing " + csv.string());
    const std::string intervals = interval_text(s.p);
    std::size_t unresolved = 0;
    for (std::size_t i = 0; i < qv_sweep_size(s.p); ++i) {
      int status = 0;
      qv_sweep_node(s.p, i, nullptr, &status, nullptr, nullptr, nullptr);
      if (status != 0) ++unresolved;
    }
    std::cout << "mu=" << fmt(a.mu[k]) << " metastable: " << intervals;
    if (unresolved) std::cout << " (" << unresolved << " unresolved nodes)";
    std::cout << "\n";
    summary.push_back({{"mu", a.mu[k]}, {"metastable", intervals}, {"unresolved", unresolved}});
    sweeps.push_back(std::move(s));
  }
  m.add_output(csv);
  if (a.plot) {
    std::vector<const qv_sweep*> raw;
    for (const auto& s : sweeps) raw.push_back(s.p);
    const fs::path svg = dir / "sweep.svg";
    check(qv_sweep_svg(raw.data(), raw.size(), svg.c_str()), "writing " + svg.string());
    m.add_output(svg);
  }
  m["parameters"] = params_json(p.p);
  m["parameters"]["mu"] = a.mu;
  m["parameters"]["z_min"] = a.z_min;
  m["parameters"]["z_max"] = a.z_max;
  m["parameters"]["n"] = a.n;
  m["tolerances"]["self_consistency"] = a.c.tol;
  m["result"] = summary;
  m.write(dir);
  return kExitOk;
}

// ---- profile --------------------------------------------------------------

struct ProfileArgs {
  Common c;
  double mu = 0.0, z = 0.0;
  std::size_t samples = 101;
  bool scaled = false;
};

int cmd_profile(const ProfileArgs& a, Manifest& m) {
  Params p = load_params(a.c.config);
  const fs::path dir = output_dir(a.c.out);
  State s;
  check(qv_solve(p.p, a.mu, a.z, a.c.tol, &s.p), "solve");
  std::vector<double> r(a.samples), rho(a.samples);
  check(qv_state_density(s.p, a.samples, r.data(), rho.data()), "density");

  std::ostringstream out;
  out << "# qvortex density v1\n";
  out << "r,rho\n";
  out.precision(17);
  for (std::size_t i = 0; i < a.samples; ++i) out << r[i] << ',' << rho[i] << '\n';
  const std::string body = out.str();
  const fs::path file = dir / "profile.csv";
  check(qv_write_file(file.c_str(), body.data(), body.size()), "writing " + file.string());
  m.add_output(file);
  if (a.scaled) {
    const fs::path scaled = dir / "scaled_profile.csv";
    check(qv_state_profile_csv(s.p, scaled.c_str()), "writing " + scaled.string());
    m.add_output(scaled);
  }
  std::cout << "rho(0)=" << fmt(rho.front()) << " rho(R)=" << fmt(rho.back())
            << " ratio=" << fmt(rho.back() / rho.front()) << "\n";
  m["parameters"] = params_json(p.p);
  m["parameters"]["mu"] = a.mu;
  m["parameters"]["z"] = a.z;
  m["parameters"]["samples"] = a.samples;
  m["tolerances"]["self_consistency"] = a.c.tol;
  m.write(dir);
  return kExitOk;
}

// ---- mc -------------------------------------------------------------------

struct McArgs {
  std::string config;
  std::string out_dir;
  std::vector<std::string> overrides;  // key=value
};

int cmd_mc(const McArgs& a, Manifest& m) {
  const fs::path dir = output_dir(a.out_dir);
  McSetup setup;
  check(qv_mc_setup_load(a.config.c_str(), &setup.p), "--config " + a.config);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{kExitUsage, "--set expects key=value, got " + kv};
    check(qv_mc_setup_set(setup.p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()),
          "--set " + kv);
  }
  char* desc = nullptr;
  check(qv_mc_setup_describe_json(setup.p, &desc), "mc config");
  const json d = json::parse(take(desc));

  McResult r;
  check(qv_mc_run(setup.p, &r.p), "Monte Carlo run");
  const fs::path summary = dir / "mc_summary.json", hist = dir / "mc_histogram.csv",
                 trace = dir / "mc_trace.csv";
  check(qv_mc_result_write(r.p, summary.c_str(), hist.c_str(), trace.c_str()), "writing outputs");
  char* digest = nullptr;
  check(qv_mc_result_trace_digest(r.p, &digest), "trace digest");
  const std::string trace_digest = take(digest);

  Params mf;
  check(qv_params_create(&mf.p), "parameters");
  for (const auto& [k, v] : d["meanfield"].items()) qv_params_set(mf.p, k.c_str(), v.get<double>());
  qv_mc_stats st{};
  check(qv_mc_result_stats(r.p, mf.p, &st), "statistics");

  std::cout << "acceptance=" << fmt(st.acceptance_rate) << " (point " << fmt(st.point_acceptance)
            << ", translate " << fmt(st.translate_acceptance) << ")\n";
  std::cout << "K/N=" << fmt(st.kinetic_per_filament) << " +- "
            << fmt(st.kinetic_per_filament_error)
            << " equipartition=" << fmt(st.equipartition_kinetic) << "\n";
  std::cout << "<r^2>=" << fmt(st.mean_square_radius) << " +- " << fmt(st.mean_square_radius_error)
            << " r99=" << fmt(st.radius_q99) << "\n";
  std::cout << "mean-field mapping: mu=" << fmt(st.meanfield_mu) << " beta=" << fmt(st.meanfield_beta)
            << " z=" << fmt(st.meanfield_z) << "\n";
  std::cout << "trace digest " << trace_digest << "\n";

  for (const auto& f : {summary, hist, trace}) m.add_output(f);
  m["parameters"] = d;
  m["seeds"] = json::array({d["seed"]});
  m["trace_digest"] = trace_digest;
  m["meanfield_mapping"] = {{"mu", st.meanfield_mu}, {"beta", st.meanfield_beta}, {"z", st.meanfield_z}};
  m.write(dir);
  return kExitOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  Common c;
  std::string summary;
  double mu = 0.0, z = 0.0;
  double radius = 1.0;
  double max_l1 = 0.15, ratio_lo = 0.85, ratio_hi = 1.15;
};

int cmd_compare(const CompareArgs& a, Manifest& m) {
  McResult r;
  check(qv_mc_result_load(a.summary.c_str(), &r.p), "--mc-summary " + a.summary);
  const json sj = json::parse(std::ifstream(a.summary));

  // Lambda = N Gamma and the filament constants come from the run itself.
  Params p;
  check(qv_params_create(&p.p), "parameters");
  const double gamma = sj["model"]["gamma"].get<double>();
  qv_params_set(p.p, "gamma", gamma);
  qv_params_set(p.p, "epsilon", sj["model"]["epsilon"].get<double>());
  qv_params_set(p.p, "alpha", sj["model"]["alpha"].get<double>());
  qv_params_set(p.p, "lambda_total", gamma * sj["n_filaments"].get<double>());
  qv_params_set(p.p, "radius", a.radius);
  const fs::path dir = output_dir(a.c.out);

  State s;
  check(qv_solve(p.p, a.mu, a.z, a.c.tol, &s.p), "solve");
  qv_comparison cmp{};
  check(qv_mc_compare(r.p, s.p, &cmp), "compare");

  const bool l1_ok = cmp.l1 <= a.max_l1;
  const bool ratio_ok = cmp.moment_ratio >= a.ratio_lo && cmp.moment_ratio <= a.ratio_hi;
  std::cout << "L1=" << fmt(cmp.l1) << " (limit " << fmt(a.max_l1) << ") "
            << (l1_ok ? "PASS" : "FAIL") << "\n";
  std::cout << "moment ratio=" << fmt(cmp.moment_ratio) << " (range [" << fmt(a.ratio_lo) << ","
            << fmt(a.ratio_hi) << "]) " << (ratio_ok ? "PASS" : "FAIL") << "\n";
  std::cout << "MC mass beyond R=" << fmt(cmp.fraction_outside) << " bins=" << cmp.bins_used << "\n";

  const json result = {{"l1", cmp.l1},
                       {"moment_ratio", cmp.moment_ratio},
                       {"mc_mean_square_radius", cmp.mc_mean_square_radius},
                       {"mf_mean_square_radius", cmp.mf_mean_square_radius},
                       {"fraction_outside", cmp.fraction_outside},
                       {"bins_used", cmp.bins_used},
                       {"l1_pass", l1_ok},
                       {"ratio_pass", ratio_ok}};
  const fs::path file = dir / "comparison.json";
  const std::string body = result.dump(2) + "\n";
  check(qv_write_file(file.c_str(), body.data(), body.size()), "writing " + file.string());
  m.add_output(file);
  m["parameters"] = params_json(p.p);
  m["parameters"]["mu"] = a.mu;
  m["parameters"]["z"] = a.z;
  m["parameters"]["mc_summary"] = a.summary;
  m["seeds"] = sj["seeds"];
  m["tolerances"] = {{"self_consistency", a.c.tol},
                     {"max_l1", a.max_l1},
                     {"ratio_range", {a.ratio_lo, a.ratio_hi}}};
  m["result"] = result;
  m.write(dir);
  return (l1_ok && ratio_ok) ? kExitOk : kExitDomain;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key = value parameter file")->check(CLI::ExistingFile);
  app->add_option("--tol", c.tol, "self-consistency tolerance")->check(CLI::Range(1e-13, 1e-3));
  app->add_option("--out", c.out, "output directory (default $QVORTEX_OUT_DIR or .)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field and Monte Carlo thermodynamics of confined vortex filaments"};
  app.set_version_flag("--version", std::string(qv_version()));
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "solve one self-consistent state");
  add_common(s, solve.c);
  s->add_option("--mu", solve.mu, "confinement strength")->required();
  s->add_option("--z", solve.z, "scaled radius")->required();
  s->add_option("--format", solve.format)->check(CLI::IsMember({"csv", "json"}));

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "thermodynamics over a z grid");
  add_common(w, sweep.c);
  w->add_option("--mu", sweep.mu, "one or more confinement strengths")->required();
  w->add_option("--z-min", sweep.z_min);
  w->add_option("--z-max", sweep.z_max);
  w->add_option("--n", sweep.n, "grid points")->check(CLI::Range(3, 100000));
  w->add_flag("--plot", sweep.plot, "also write sweep.svg");
  w->add_option("--threads", sweep.threads)->check(CLI::Range(1, 256));

  ProfileArgs prof;
  auto* pr = app.add_subcommand("profile", "density profile of one state");
  add_common(pr, prof.c);
  pr->add_option("--mu", prof.mu)->required();
  pr->add_option("--z", prof.z)->required();
  pr->add_option("--samples", prof.samples)->check(CLI::Range(2, 1000000));
  pr->add_flag("--scaled", prof.scaled, "also write the scaled ODE solution");

  McArgs mc;
  auto* mcc = app.add_subcommand("mc", "Metropolis sampling of the filament ensemble");
  mcc->add_option("--config", mc.config)->required()->check(CLI::ExistingFile);
  mcc->add_option("--out-dir", mc.out_dir, "output directory (default $QVORTEX_OUT_DIR or .)");
  mcc->add_option("--set", mc.overrides, "override a config key, key=value");

  CompareArgs cmp;
  auto* cp = app.add_subcommand("compare", "compare a Monte Carlo run with the mean-field state");
  cp->add_option("--tol", cmp.c.tol)->check(CLI::Range(1e-13, 1e-3));
  cp->add_option("--out", cmp.c.out, "output directory (default $QVORTEX_OUT_DIR or .)");
  cp->add_option("--radius", cmp.radius, "confinement radius R")->check(CLI::PositiveNumber);
  cp->add_option("--mc-summary", cmp.summary)->required()->check(CLI::ExistingFile);
  cp->add_option("--mu", cmp.mu)->required();
  cp->add_option("--z", cmp.z)->required();
  cp->add_option("--max-l1", cmp.max_l1);
  cp->add_option("--ratio-min", cmp.ratio_lo);
  cp->add_option("--ratio-max", cmp.ratio_hi);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    Manifest manifest(sub->get_name(), argc, argv);
    if (sub == s) return cmd_solve(solve, manifest);
    if (sub == w) return cmd_sweep(sweep, manifest);
    if (sub == pr) return cmd_profile(prof, manifest);
    if (sub == mcc) return cmd_mc(mc, manifest);
    return cmd_compare(cmp, manifest);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
