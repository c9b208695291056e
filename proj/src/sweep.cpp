#include "qvortex/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "qvortex/io.hpp"

namespace qvortex {

namespace {

void solve_chunk(double mu, const ModelParams& params, double tol, std::vector<SweepNode>& nodes,
                 std::size_t begin, std::size_t end) {
  std::optional<double> warm;
  for (std::size_t i = begin; i < end; ++i) {
    auto& node = nodes[i];
    try {
      auto state = solve_state(mu, node.z, SolveOptions{tol, warm});
      node.point = evaluate(state, params);
      node.residual = state.residual;
      node.status = NodeStatus::Ok;
      warm = state.a;
    } catch (const Unreachable& e) {
      node.status = NodeStatus::Unreachable;
      node.message = e.what();
      warm.reset();
    } catch (const std::exception& e) {
      node.status = NodeStatus::Failed;
      node.message = e.what();
      warm.reset();
    }
  }
}

double max_abs(const SweepTable& t, double ThermoPoint::*field) {
  double m = 0.0;
  for (const auto& n : t.nodes)
    if (n.point) m = std::max(m, std::abs((*n.point).*field));
  return m;
}

double energy_noise(const SweepTable& t, const ModelParams& p) {
  return kEnergyNoiseFraction *
         std::max(p.lambda_total * p.lambda_total / p.epsilon, max_abs(t, &ThermoPoint::energy));
}

Sign sign_of(double delta, double zero_band) {
  if (std::abs(delta) <= zero_band) return Sign::Zero;
  return delta < 0 ? Sign::Negative : Sign::Positive;
}

}  // namespace

std::string_view status_name(NodeStatus s) {
  switch (s) {
    case NodeStatus::Ok: return "ok";
    case NodeStatus::Unreachable: return "unreachable";
    case NodeStatus::Failed: return "failed";
  }
  return "unknown";
}

SweepTable run_sweep(double mu, double z_min, double z_max, std::size_t n_points,
                     const ModelParams& params, const SweepOptions& options) {
  validate(params);
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be non-negative");
  if (!(z_min > 0.0) || !(z_max > z_min))
    throw std::invalid_argument("sweep needs 0 < z_min < z_max");
  if (n_points < 3) throw std::invalid_argument("sweep needs at least 3 points");

  SweepTable table;
  table.mu = mu;
  table.z_grid.resize(n_points);
  table.nodes.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double z = (i + 1 == n_points)
                         ? z_max
                         : z_min + (z_max - z_min) * static_cast<double>(i) / (n_points - 1);
    table.z_grid[i] = z;
    table.nodes[i].z = z;
  }

  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, n_points);
  if (workers == 1) {
    solve_chunk(mu, params, options.tol, table.nodes, 0, n_points);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n_points + workers - 1) / workers;
    for (std::size_t b = 0; b < n_points; b += chunk)
      pool.emplace_back(solve_chunk, mu, std::cref(params), options.tol, std::ref(table.nodes), b,
                        std::min(b + chunk, n_points));
  }

  if (std::none_of(table.nodes.begin(), table.nodes.end(),
                   [](const SweepNode& n) { return n.status == NodeStatus::Ok; }))
    throw EmptySweep("no grid point could be solved for mu = " + format_double(mu));

  compute_specific_heat(table, params);
  table.metastable_intervals = detect_metastable(table);
  return table;
}

void compute_specific_heat(SweepTable& table, const ModelParams& params) {
  const double t_scale = max_abs(table, &ThermoPoint::temperature);
  const double e_noise = energy_noise(table, params);
  auto& nodes = table.nodes;
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    nodes[i].cv.reset();
    const auto& lo = nodes[i - 1].point;
    const auto& hi = nodes[i + 1].point;
    if (!nodes[i].point || !lo || !hi) continue;
    const double dT = hi->temperature - lo->temperature;
    if (std::abs(dT) < kTemperatureFlatFraction * t_scale) continue;
    double dE = hi->energy - lo->energy;
    if (std::abs(dE) <= e_noise) dE = 0.0;
    nodes[i].cv = dE / dT;
  }
}

std::vector<ZInterval> detect_metastable(const SweepTable& table) {
  std::vector<ZInterval> out;
  std::optional<ZInterval> run;
  for (const auto& n : table.nodes) {
    if (n.cv && *n.cv < 0.0) {
      if (run)
        run->z_end = n.z;
      else
        run = ZInterval{n.z, n.z};
    } else if (run) {
      out.push_back(*run);
      run.reset();
    }
  }
  if (run) out.push_back(*run);
  return out;
}

MonotonicityReport monotonicity_report(const SweepTable& table, const ModelParams& params) {
  MonotonicityReport rep;
  const double e_noise = energy_noise(table, params);
  const double rho_band = 1e-9 * max_abs(table, &ThermoPoint::rho0);
  const auto& nodes = table.nodes;
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    rep.z.push_back(nodes[i].z);
    const auto& lo = nodes[i - 1].point;
    const auto& hi = nodes[i + 1].point;
    if (!lo || !hi) {
      rep.dT.push_back(Sign::Undefined);
      rep.dE.push_back(Sign::Undefined);
      rep.drho0.push_back(Sign::Undefined);
      continue;
    }
    rep.dT.push_back(sign_of(hi->temperature - lo->temperature, 0.0));
    rep.dE.push_back(sign_of(hi->energy - lo->energy, e_noise));
    rep.drho0.push_back(sign_of(hi->rho0 - lo->rho0, rho_band));
  }
  auto all = [](const std::vector<Sign>& v, Sign s) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [s](Sign x) { return x == s; });
  };
  rep.t_strictly_decreasing = all(rep.dT, Sign::Negative);
  rep.e_strictly_increasing = all(rep.dE, Sign::Positive);
  rep.rho0_strictly_decreasing = all(rep.drho0, Sign::Negative);
  rep.rho0_constant = all(rep.drho0, Sign::Zero);
  rep.e_constant = all(rep.dE, Sign::Zero);
  return rep;
}

void write_sweep_csv(const SweepTable& table, std::ostream& out, bool header) {
  if (header) {
    out << "# qvortex sweep v1\n";
    out << "mu,z,a,beta,T,E,rho0,p,S,cv,regime,status\n";
  }
  for (const auto& n : table.nodes) {
    out << format_double(table.mu) << ',' << format_double(n.z) << ',';
    if (n.point) {
      const auto& t = *n.point;
      out << format_double(t.a) << ',' << format_double(t.beta) << ','
          << format_double(t.temperature) << ',' << format_double(t.energy) << ','
          << format_double(t.rho0) << ',' << format_double(t.pressure) << ','
          << format_double(t.entropy) << ',';
    } else {
      out << ",,,,,,,";
    }
    if (n.cv) out << format_double(*n.cv);
    out << ',';
    if (n.point) out << regime_name(n.point->regime);
    out << ',' << status_name(n.status) << '\n';
  }
}

void write_sweep_svg(std::span<const SweepTable> tables, std::ostream& out) {
  constexpr int width = 640, panel_h = 200, margin_l = 70, margin_r = 20, gap = 40;
  constexpr int height = 3 * panel_h + 4 * gap;
  static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                           "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  struct Panel {
    const char* label;
    double ThermoPoint::*field;
  };
  const Panel panels[] = {{"E", &ThermoPoint::energy},
                          {"T", &ThermoPoint::temperature},
                          {"rho0", &ThermoPoint::rho0}};

  double zlo = std::numeric_limits<double>::infinity(), zhi = -zlo;
  for (const auto& t : tables)
    for (const auto& n : t.nodes)
      if (n.point) {
        zlo = std::min(zlo, n.z);
        zhi = std::max(zhi, n.z);
      }
  if (!(zhi > zlo)) zhi = zlo + 1.0;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k < 3; ++k) {
    const int top = gap + k * (panel_h + gap);
    double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
    for (const auto& t : tables)
      for (const auto& n : t.nodes)
        if (n.point) {
          const double v = (*n.point).*panels[k].field;
          ylo = std::min(ylo, v);
          yhi = std::max(yhi, v);
        }
    if (!(yhi > ylo)) {
      ylo -= 0.5;
      yhi += 0.5;
    }
    auto px = [&](double z) {
      return margin_l + (width - margin_l - margin_r) * (z - zlo) / (zhi - zlo);
    };
    auto py = [&](double y) { return top + panel_h * (1.0 - (y - ylo) / (yhi - ylo)); };
    out << "<rect x=\"" << margin_l << "\" y=\"" << top << "\" width=\""
        << width - margin_l - margin_r << "\" height=\"" << panel_h
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"8\" y=\"" << top + panel_h / 2 << "\">" << panels[k].label << "</text>\n";
    out << "<text x=\"8\" y=\"" << top + 10 << "\">" << format_double(yhi) << "</text>\n";
    out << "<text x=\"8\" y=\"" << top + panel_h << "\">" << format_double(ylo) << "</text>\n";
    for (std::size_t ti = 0; ti < tables.size(); ++ti) {
      out << "<polyline fill=\"none\" stroke=\"" << colors[ti % std::size(colors)]
          << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (const auto& n : tables[ti].nodes) {
        if (!n.point) continue;
        if (!first) out << ' ';
        first = false;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f,%.2f", px(n.z), py((*n.point).*panels[k].field));
        out << buf;
      }
      out << "\"/>\n";
    }
  }
  const int axis_y = height - gap / 2;
  out << "<text x=\"" << margin_l << "\" y=\"" << axis_y << "\">z = " << format_double(zlo)
      << "</text>\n";
  out << "<text x=\"" << width - margin_r - 80 << "\" y=\"" << axis_y
      << "\">z = " << format_double(zhi) << "</text>\n";
  for (std::size_t ti = 0; ti < tables.size(); ++ti)
    out << "<text x=\"" << margin_l + 10 + 90 * static_cast<int>(ti) << "\" y=\"" << gap / 2
        << "\" fill=\"" << colors[ti % std::size(colors)] << "\">mu = "
        << format_double(tables[ti].mu) << "</text>\n";
  out << "</svg>\n";
}

}  // namespace qvortex
