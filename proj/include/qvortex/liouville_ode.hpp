#ifndef QVORTEX_LIOUVILLE_ODE_HPP
#define QVORTEX_LIOUVILLE_ODE_HPP

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace qvortex {

// Radial family  v'' + v'/r + exp(-v + a r^2) = 0,  v(0) = v'(0) = 0,
// in the scaled radius r1. The source parameter a couples back to the
// confinement through a = mu * v'(z) / z (see selfconsistent.hpp).

class BlowUp : public std::runtime_error {
 public:
  BlowUp(double r_reached, double a);
  double r_reached() const noexcept { return r_reached_; }

 private:
  double r_reached_;
};

class ToleranceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProfileNode {
  double r1;
  double v1;
  double dv1;
};

class ScaledProfile {
 public:
  double a() const noexcept { return a_; }
  double r_max() const noexcept { return r_max_; }
  double tol() const noexcept { return tol_; }
  // End of the analytic origin expansion; adaptive steps start here.
  double r_start() const noexcept { return r_start_; }

  // Accepted step ends. The first node is the origin (0, 0, 0).
  const std::vector<ProfileNode>& nodes() const noexcept { return nodes_; }

  // Dense output anywhere on [0, r_max].
  ProfileNode at(double r1) const;
  double v1(double r1) const { return at(r1).v1; }
  double dv1(double r1) const { return at(r1).dv1; }

  // Flux form of the equation, r v'(r) + int_0^r s exp(-v + a s^2) ds = 0,
  // evaluated on the dense output and scaled by max(1, |r v'|).
  double residual(double r1) const;

  // int_0^r1 s exp(-v(s) + a s^2) ds by Gauss-Legendre on the step grid.
  double enclosed_source(double r1) const;

  // Right-hand side source term exp(-v(r1) + a r1^2).
  double source(double r1) const;

 private:
  friend ScaledProfile integrate_family(double a, double r1_end, double tol);

  struct Segment {
    double r0;
    double h;
    std::array<std::array<double, 2>, 5> cont;
    double enclosed = 0.0;  // enclosed_source(r0)
  };

  const Segment* find_segment(double r1) const;
  std::array<double, 3> series(double r1) const;  // v, v', v''
  double source_integral(double lo, double hi) const;

  double a_ = 0.0;
  double r_max_ = 0.0;
  double tol_ = 0.0;
  double r_start_ = 0.0;
  double c4_ = 0.0;
  double c6_ = 0.0;
  std::vector<ProfileNode> nodes_;
  std::vector<Segment> segments_;
};

// Integrates from the regular origin to r1_end with relative/absolute
// tolerance tol in [1e-14, 1e-4]. Throws BlowUp when the source exceeds 1e12
// or the step collapses below 1e-13 * r1_end, ToleranceFailure when step
// control cannot make progress.
ScaledProfile integrate_family(double a, double r1_end, double tol);

// "r1,v1,dv1" at every node, preceded by a versioned comment line.
void write_profile_csv(const ScaledProfile& profile, std::ostream& out);

}  // namespace qvortex

#endif
