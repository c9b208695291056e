#ifndef QVORTEX_SELFCONSISTENT_HPP
#define QVORTEX_SELFCONSISTENT_HPP

#include <optional>
#include <stdexcept>

#include "qvortex/liouville_ode.hpp"

namespace qvortex {

class NoBracket : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The profile cannot be continued to z for any admissible source parameter.
class Unreachable : public std::runtime_error {
 public:
  Unreachable(double z, double mu);
  double z() const noexcept { return z_; }

 private:
  double z_;
};

// A (mu, z) pair with the source parameter a that satisfies a * z = mu * v'(z; a).
struct ConsistentState {
  double mu = 0.0;
  double z = 0.0;
  double a = 0.0;
  double v1_z = 0.0;
  double v1p_z = 0.0;
  ScaledProfile profile;
  double residual = 0.0;        // |a z - mu v'(z)|
  bool multiple_roots = false;  // more than one sign change seen while bracketing
  int evaluations = 0;          // ODE solves spent on this state
};

struct SolveOptions {
  double tol = 1e-10;
  // Previous grid point's a; used to seed a local bracket before the global scan.
  std::optional<double> warm_start;
};

// Lower end of the bracket scan on a.
inline constexpr double kBracketFloor = -64.0;

ConsistentState solve_state(double mu, double z, const SolveOptions& options = {});

inline ConsistentState solve_state(double mu, double z, double tol) {
  return solve_state(mu, z, SolveOptions{tol, std::nullopt});
}

}  // namespace qvortex

#endif
