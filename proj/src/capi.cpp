#include "qvortex/qvortex.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qvortex/config.hpp"
#include "qvortex/filament_mc.hpp"
#include "qvortex/io.hpp"
#include "qvortex/liouville_ode.hpp"
#include "qvortex/model.hpp"
#include "qvortex/selfconsistent.hpp"
#include "qvortex/sweep.hpp"
#include "qvortex/thermo.hpp"

#ifndef QVORTEX_VERSION_STRING
#define QVORTEX_VERSION_STRING "0.0.0"
#endif

struct qv_params {
  qvortex::ModelParams p;
};

struct qv_state {
  qvortex::ModelParams params;
  qvortex::ConsistentState state;
  qvortex::ThermoPoint thermo;
};

struct qv_sweep {
  qvortex::ModelParams params;
  qvortex::SweepTable table;
};

struct qv_mc_setup {
  qvortex::KeyValueConfig cfg;
};

struct qv_mc_result {
  qvortex::McObservables obs;
};

namespace {

thread_local std::string g_last_error;

qv_status fail(qv_status code, std::string message) {
  g_last_error = std::move(message);
  return code;
}

// Maps the exception in flight to a status code.
qv_status translate() {
  try {
    throw;
  } catch (const qvortex::ValidationError& e) {
    return fail(QV_ERR_VALIDATION, e.what());
  } catch (const qvortex::BlowUp& e) {
    return fail(QV_ERR_BLOWUP, e.what());
  } catch (const qvortex::ToleranceFailure& e) {
    return fail(QV_ERR_TOLERANCE, e.what());
  } catch (const qvortex::NoBracket& e) {
    return fail(QV_ERR_NO_BRACKET, e.what());
  } catch (const qvortex::Unreachable& e) {
    return fail(QV_ERR_UNREACHABLE, e.what());
  } catch (const qvortex::CoincidentPoints& e) {
    return fail(QV_ERR_COINCIDENT, e.what());
  } catch (const qvortex::MismatchedParameters& e) {
    return fail(QV_ERR_MISMATCHED, e.what());
  } catch (const qvortex::NonpositivePressure& e) {
    return fail(QV_ERR_NONPOSITIVE_PRESSURE, e.what());
  } catch (const qvortex::EmptySweep& e) {
    return fail(QV_ERR_EMPTY_SWEEP, e.what());
  } catch (const qvortex::ConfigError& e) {
    return fail(QV_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(QV_ERR_VALIDATION, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(QV_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(QV_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QV_ERR_INTERNAL, "unknown error");
  }
}

template <typename F>
qv_status guarded(F&& f) {
  try {
    f();
    return QV_OK;
  } catch (...) {
    return translate();
  }
}

qv_status null_arg(const char* what) {
  return fail(QV_ERR_VALIDATION, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double* param_field(qvortex::ModelParams& p, const std::string& name) {
  if (name == "lambda_total") return &p.lambda_total;
  if (name == "epsilon") return &p.epsilon;
  if (name == "gamma") return &p.gamma;
  if (name == "alpha") return &p.alpha;
  if (name == "radius") return &p.radius;
  if (name == "mu") return &p.mu;
  return nullptr;
}

void fill(const qvortex::ThermoPoint& t, double residual, bool multiple, qv_thermo* out) {
  out->mu = t.mu;
  out->z = t.z;
  out->a = t.a;
  out->beta = t.beta;
  out->temperature = t.temperature;
  out->energy = t.energy;
  out->rho0 = t.rho0;
  out->pressure = t.pressure;
  out->entropy = t.entropy;
  out->virial_residual = t.virial_residual;
  out->residual = residual;
  out->regime = static_cast<int>(t.regime);
  out->multiple_roots = multiple ? 1 : 0;
}

std::ofstream open_out(const char* path, bool append = false) {
  std::ofstream f(path, append ? std::ios::app : std::ios::trunc);
  if (!f) throw std::ios_base::failure(std::string("cannot open ") + path + " for writing");
  return f;
}

void write_text(const char* path, const std::string& text) {
  try {
    qvortex::write_file_atomically(path, text);
  } catch (const std::ios_base::failure&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw std::ios_base::failure(e.what());
  }
}

}  // namespace

extern "C" {

const char* qv_last_error(void) { return g_last_error.c_str(); }

const char* qv_status_name(qv_status s) {
  switch (s) {
    case QV_OK: return "ok";
    case QV_ERR_VALIDATION: return "validation";
    case QV_ERR_BLOWUP: return "blowup";
    case QV_ERR_TOLERANCE: return "tolerance";
    case QV_ERR_NO_BRACKET: return "no_bracket";
    case QV_ERR_UNREACHABLE: return "unreachable";
    case QV_ERR_COINCIDENT: return "coincident";
    case QV_ERR_MISMATCHED: return "mismatched";
    case QV_ERR_NONPOSITIVE_PRESSURE: return "nonpositive_pressure";
    case QV_ERR_EMPTY_SWEEP: return "empty_sweep";
    case QV_ERR_CONFIG: return "config";
    case QV_ERR_IO: return "io";
    case QV_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* qv_version(void) { return QVORTEX_VERSION_STRING; }

qv_status qv_params_create(qv_params** out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = new qv_params{}; });
}

qv_status qv_params_load(const char* path, qv_params** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto cfg = qvortex::KeyValueConfig::load(path);
    *out = new qv_params{qvortex::params_from_config(cfg)};
  });
}

void qv_params_destroy(qv_params* p) { delete p; }

qv_status qv_params_set(qv_params* p, const char* name, double value) {
  if (!p) return null_arg("params");
  if (!name) return null_arg("name");
  double* f = param_field(p->p, name);
  if (!f) return fail(QV_ERR_VALIDATION, std::string("unknown parameter '") + name + "'");
  *f = value;
  return QV_OK;
}

qv_status qv_params_get(const qv_params* p, const char* name, double* value) {
  if (!p) return null_arg("params");
  if (!name) return null_arg("name");
  if (!value) return null_arg("value");
  auto copy = p->p;
  double* f = param_field(copy, name);
  if (!f) return fail(QV_ERR_VALIDATION, std::string("unknown parameter '") + name + "'");
  *value = *f;
  return QV_OK;
}

qv_status qv_params_validate(const qv_params* p) {
  if (!p) return null_arg("params");
  return guarded([&] { qvortex::validate(p->p); });
}

qv_status qv_solve(const qv_params* p, double mu, double z, double tol, qv_state** out) {
  if (!p) return null_arg("params");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto params = p->p;
    params.mu = mu;
    qvortex::validate(params);
    auto st = std::make_unique<qv_state>();
    st->params = params;
    st->state = qvortex::solve_state(mu, z, tol);
    st->thermo = qvortex::evaluate(st->state, params);
    *out = st.release();
  });
}

void qv_state_destroy(qv_state* s) { delete s; }

qv_status qv_state_thermo(const qv_state* s, qv_thermo* out) {
  if (!s) return null_arg("state");
  if (!out) return null_arg("out");
  fill(s->thermo, s->state.residual, s->state.multiple_roots, out);
  return QV_OK;
}

const char* qv_regime_name(int regime) {
  if (regime < 0 || regime > 2) return "Unknown";
  return qvortex::regime_name(static_cast<qvortex::Regime>(regime)).data();
}

qv_status qv_state_density(const qv_state* s, size_t n, double* r, double* rho) {
  if (!s) return null_arg("state");
  if (!r || !rho) return null_arg("output array");
  return guarded([&] {
    const auto prof = qvortex::density_profile(s->state, s->params, n);
    for (size_t i = 0; i < n; ++i) {
      r[i] = prof[i].r;
      rho[i] = prof[i].rho;
    }
  });
}

qv_status qv_state_integrated_circulation(const qv_state* s, double* out) {
  if (!s) return null_arg("state");
  if (!out) return null_arg("out");
  return guarded([&] { *out = qvortex::integrated_circulation(s->state, s->params); });
}

qv_status qv_state_mean_square_radius(const qv_state* s, double* out) {
  if (!s) return null_arg("state");
  if (!out) return null_arg("out");
  return guarded([&] { *out = qvortex::mean_square_radius(s->state, s->params); });
}

qv_status qv_state_profile_csv(const qv_state* s, const char* path) {
  if (!s) return null_arg("state");
  if (!path) return null_arg("path");
  return guarded([&] {
    std::ostringstream out;
    qvortex::write_profile_csv(s->state.profile, out);
    write_text(path, out.str());
  });
}

qv_status qv_state_thermo_csv(const qv_state* s, const char* path) {
  if (!s) return null_arg("state");
  if (!path) return null_arg("path");
  return guarded([&] {
    std::ostringstream out;
    qvortex::write_thermo_csv_header(out);
    qvortex::write_thermo_csv_row(s->thermo, out);
    write_text(path, out.str());
  });
}

qv_status qv_state_thermo_json(const qv_state* s, char** json) {
  if (!s) return null_arg("state");
  if (!json) return null_arg("json");
  return guarded([&] {
    const auto& t = s->thermo;
    nlohmann::json j = {{"mu", t.mu},
                        {"z", t.z},
                        {"a", t.a},
                        {"beta", t.beta},
                        {"T", t.temperature},
                        {"E", t.energy},
                        {"rho0", t.rho0},
                        {"p", t.pressure},
                        {"S", t.entropy},
                        {"regime", std::string(qvortex::regime_name(t.regime))},
                        {"virial_residual", t.virial_residual},
                        {"residual", s->state.residual},
                        {"multiple_roots", s->state.multiple_roots}};
    *json = dup_string(j.dump(2) + "\n");
  });
}

void qv_string_free(char* s) { std::free(s); }

qv_status qv_profile_csv(double a, double r1_end, double tol, const char* path) {
  if (!path) return null_arg("path");
  return guarded([&] {
    const auto prof = qvortex::integrate_family(a, r1_end, tol);
    std::ostringstream out;
    qvortex::write_profile_csv(prof, out);
    write_text(path, out.str());
  });
}

qv_status qv_sweep_run(const qv_params* p, double mu, double z_min, double z_max, size_t n,
                       double tol, unsigned threads, qv_sweep** out) {
  if (!p) return null_arg("params");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto params = p->p;
    params.mu = mu;
    auto sw = std::make_unique<qv_sweep>();
    sw->params = params;
    sw->table = qvortex::run_sweep(mu, z_min, z_max, n, params, {tol, threads});
    *out = sw.release();
  });
}

void qv_sweep_destroy(qv_sweep* s) { delete s; }

size_t qv_sweep_size(const qv_sweep* s) { return s ? s->table.nodes.size() : 0; }

qv_status qv_sweep_node(const qv_sweep* s, size_t i, double* z, int* status, qv_thermo* thermo,
                        int* has_cv, double* cv) {
  if (!s) return null_arg("sweep");
  if (i >= s->table.nodes.size()) return fail(QV_ERR_VALIDATION, "sweep node index out of range");
  const auto& n = s->table.nodes[i];
  if (z) *z = n.z;
  if (status) *status = static_cast<int>(n.status);
  if (thermo) {
    *thermo = qv_thermo{};
    if (n.point) fill(*n.point, n.residual, false, thermo);
  }
  if (has_cv) *has_cv = n.cv.has_value() ? 1 : 0;
  if (cv) *cv = n.cv.value_or(0.0);
  return QV_OK;
}

size_t qv_sweep_metastable_count(const qv_sweep* s) {
  return s ? s->table.metastable_intervals.size() : 0;
}

qv_status qv_sweep_metastable(const qv_sweep* s, size_t i, double* z_start, double* z_end) {
  if (!s) return null_arg("sweep");
  if (i >= s->table.metastable_intervals.size())
    return fail(QV_ERR_VALIDATION, "metastable interval index out of range");
  if (z_start) *z_start = s->table.metastable_intervals[i].z_start;
  if (z_end) *z_end = s->table.metastable_intervals[i].z_end;
  return QV_OK;
}

qv_status qv_sweep_csv(const qv_sweep* s, const char* path, int append) {
  if (!s) return null_arg("sweep");
  if (!path) return null_arg("path");
  return guarded([&] {
    if (append) {
      auto f = open_out(path, true);
      qvortex::write_sweep_csv(s->table, f, false);
    } else {
      std::ostringstream out;
      qvortex::write_sweep_csv(s->table, out, true);
      write_text(path, out.str());
    }
  });
}

qv_status qv_sweep_svg(const qv_sweep* const* sweeps, size_t count, const char* path) {
  if (!sweeps) return null_arg("sweeps");
  if (!path) return null_arg("path");
  return guarded([&] {
    std::vector<qvortex::SweepTable> tables;
    for (size_t i = 0; i < count; ++i) {
      if (!sweeps[i]) throw std::invalid_argument("sweep handle is NULL");
      tables.push_back(sweeps[i]->table);
    }
    std::ostringstream out;
    qvortex::write_sweep_svg(tables, out);
    write_text(path, out.str());
  });
}

qv_status qv_mc_setup_load(const char* path, qv_mc_setup** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    auto s = std::make_unique<qv_mc_setup>();
    s->cfg = qvortex::KeyValueConfig::load(path);
    qvortex::mc_setup_from_config(s->cfg);
    *out = s.release();
  });
}

void qv_mc_setup_destroy(qv_mc_setup* s) { delete s; }

qv_status qv_mc_setup_set(qv_mc_setup* s, const char* key, const char* value) {
  if (!s) return null_arg("setup");
  if (!key || !value) return null_arg("key/value");
  return guarded([&] { s->cfg.set(key, value); });
}

qv_status qv_mc_setup_describe_json(const qv_mc_setup* s, char** json) {
  if (!s) return null_arg("setup");
  if (!json) return null_arg("json");
  return guarded([&] {
    const auto st = qvortex::mc_setup_from_config(s->cfg);
    nlohmann::json j;
    j["n_filaments"] = st.n_filaments;
    j["n_points"] = st.n_points;
    j["period"] = st.period;
    j["chains"] = st.chains;
    j["mu_prime"] = st.model.mu_prime;
    j["interacting"] = st.model.interacting;
    j["beta_s"] = st.config.beta_s;
    j["sweeps"] = st.config.sweeps;
    j["burn_in"] = st.config.burn_in;
    j["seed"] = st.config.seed;
    j["step_point"] = st.config.step_point;
    j["step_translate"] = st.config.step_translate;
    j["init_msr"] = st.init_mean_square_radius;
    j["meanfield"] = {{"lambda_total", st.meanfield.lambda_total},
                      {"epsilon", st.meanfield.epsilon},
                      {"gamma", st.meanfield.gamma},
                      {"alpha", st.meanfield.alpha},
                      {"radius", st.meanfield.radius},
                      {"mu", st.meanfield.mu}};
    j["config"] = s->cfg.entries();
    *json = dup_string(j.dump(2));
  });
}

qv_status qv_mc_run(const qv_mc_setup* s, qv_mc_result** out) {
  if (!s) return null_arg("setup");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto st = qvortex::mc_setup_from_config(s->cfg);
    auto r = std::make_unique<qv_mc_result>();
    r->obs = qvortex::run_chains(qvortex::initial_ensemble(st), st.config, st.chains);
    *out = r.release();
  });
}

qv_status qv_mc_result_load(const char* summary_path, qv_mc_result** out) {
  if (!summary_path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    std::ifstream f(summary_path);
    if (!f) throw std::ios_base::failure(std::string("cannot read ") + summary_path);
    std::ostringstream text;
    text << f.rdbuf();
    *out = new qv_mc_result{qvortex::mc_summary_from_json(text.str())};
  });
}

void qv_mc_result_destroy(qv_mc_result* r) { delete r; }

qv_status qv_mc_result_stats(const qv_mc_result* r, const qv_params* p, qv_mc_stats* out) {
  if (!r) return null_arg("result");
  if (!p) return null_arg("params");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto& o = r->obs;
    const auto m = qvortex::meanfield_mapping(o, p->p);
    *out = qv_mc_stats{};
    out->samples = o.samples;
    out->acceptance_rate = o.acceptance_rate;
    out->point_acceptance = o.point_acceptance;
    out->translate_acceptance = o.translate_acceptance;
    out->kinetic_per_filament = o.kinetic_per_filament.mean;
    out->kinetic_per_filament_error = o.kinetic_per_filament.error;
    out->equipartition_kinetic = static_cast<double>(o.n_points - 1) / o.config.beta_s;
    out->mean_square_radius = o.mean_square_radius.mean;
    out->mean_square_radius_error = o.mean_square_radius.error;
    out->radius_q99 = o.radius_quantile(0.99);
    out->meanfield_mu = m.mu;
    out->meanfield_beta = m.beta;
    out->meanfield_z = m.z;
  });
}

qv_status qv_mc_result_write(const qv_mc_result* r, const char* summary_json,
                             const char* histogram_csv, const char* trace_csv) {
  if (!r) return null_arg("result");
  return guarded([&] {
    if (summary_json) write_text(summary_json, qvortex::mc_summary_json(r->obs));
    if (histogram_csv) {
      std::ostringstream out;
      qvortex::write_histogram_csv(r->obs, out);
      write_text(histogram_csv, out.str());
    }
    if (trace_csv) {
      std::ostringstream out;
      qvortex::write_trace_csv(r->obs, out);
      write_text(trace_csv, out.str());
    }
  });
}

qv_status qv_mc_result_trace_digest(const qv_mc_result* r, char** hex) {
  if (!r) return null_arg("result");
  if (!hex) return null_arg("hex");
  return guarded([&] { *hex = dup_string(r->obs.trace_digest()); });
}

qv_status qv_mc_compare(const qv_mc_result* r, const qv_state* s, qv_comparison* out) {
  if (!r) return null_arg("result");
  if (!s) return null_arg("state");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto c = qvortex::compare_to_meanfield(r->obs, s->state, s->params);
    *out = qv_comparison{c.l1,
                         c.moment_ratio,
                         c.mc_mean_square_radius,
                         c.mf_mean_square_radius,
                         c.fraction_outside,
                         c.bins_used};
  });
}

qv_status qv_sha256_file(const char* path, char** hex) {
  if (!path) return null_arg("path");
  if (!hex) return null_arg("hex");
  return guarded([&] {
    try {
      *hex = dup_string(qvortex::sha256_file(path));
    } catch (const std::runtime_error& e) {
      throw std::ios_base::failure(e.what());
    }
  });
}

qv_status qv_write_file(const char* path, const char* content, size_t size) {
  if (!path) return null_arg("path");
  if (!content && size) return null_arg("content");
  return guarded([&] { write_text(path, std::string(content ? content : "", size)); });
}

}  // extern "C"
