#ifndef QVORTEX_SWEEP_HPP
#define QVORTEX_SWEEP_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvortex/thermo.hpp"

namespace qvortex {

class EmptySweep : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeStatus { Ok, Unreachable, Failed };

std::string_view status_name(NodeStatus s);

struct SweepNode {
  double z = 0.0;
  NodeStatus status = NodeStatus::Failed;
  std::optional<ThermoPoint> point;
  double residual = 0.0;      // self-consistency residual of the solved state
  std::optional<double> cv;   // interior nodes with both neighbours solved and dT resolved
  std::string message;        // failure reason when status != Ok
};

struct ZInterval {
  double z_start;
  double z_end;
};

struct SweepTable {
  double mu = 0.0;
  std::vector<double> z_grid;
  std::vector<SweepNode> nodes;
  std::vector<ZInterval> metastable_intervals;
};

struct SweepOptions {
  double tol = 1e-10;
  // 1 solves the grid in order with warm starts. More workers split the grid
  // into contiguous chunks, each warm-started from its own first node.
  unsigned threads = 1;
};

// Energy differences below this fraction of max(Lambda^2/eps, max|E|) count as zero.
inline constexpr double kEnergyNoiseFraction = 1e-9;
// Relative threshold under which a central-difference dT leaves c_v undefined.
inline constexpr double kTemperatureFlatFraction = 1e-12;

SweepTable run_sweep(double mu, double z_min, double z_max, std::size_t n_points,
                     const ModelParams& params, const SweepOptions& options = {});

// c_v_i = (E_{i+1} - E_{i-1}) / (T_{i+1} - T_{i-1}); fills table.nodes[i].cv.
void compute_specific_heat(SweepTable& table, const ModelParams& params);

// Maximal runs of interior nodes with c_v < 0 (energy change above noise).
std::vector<ZInterval> detect_metastable(const SweepTable& table);

enum class Sign { Negative = -1, Zero = 0, Positive = 1, Undefined = 2 };

struct MonotonicityReport {
  std::vector<double> z;  // interior nodes
  std::vector<Sign> dT, dE, drho0;
  bool t_strictly_decreasing = false;
  bool e_strictly_increasing = false;
  bool rho0_strictly_decreasing = false;
  bool rho0_constant = false;
  bool e_constant = false;
};

// Central-difference signs at interior nodes. E uses the energy noise floor,
// rho0 treats relative changes below 1e-9 as zero.
MonotonicityReport monotonicity_report(const SweepTable& table, const ModelParams& params);

// "mu,z,a,beta,T,E,rho0,p,S,cv,regime,status"
void write_sweep_csv(const SweepTable& table, std::ostream& out, bool header = true);

// Three stacked panels E(z), T(z), rho0(z), one polyline per table.
void write_sweep_svg(std::span<const SweepTable> tables, std::ostream& out);

}  // namespace qvortex

#endif
