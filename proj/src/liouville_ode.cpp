#include "qvortex/liouville_ode.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "qvortex/io.hpp"

namespace qvortex {

namespace {

using State = std::array<double, 2>;  // (v, v')

// Dormand-Prince 5(4) with Hairer's continuous extension.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSourceLimit = 1e12;
constexpr double kMinStepFraction = 1e-13;
constexpr std::size_t kMaxSteps = 2'000'000;

double source_exponent(double a, double r, double v) { return -v + a * r * r; }

State rhs(double a, double r, const State& y) {
  return {y[1], -y[1] / r - std::exp(source_exponent(a, r, y[0]))};
}

bool finite(const State& y) { return std::isfinite(y[0]) && std::isfinite(y[1]); }

}  // namespace

BlowUp::BlowUp(double r_reached, double a)
    : std::runtime_error("radial profile blows up at r1 = " + format_double(r_reached) +
                         " for a = " + format_double(a)),
      r_reached_(r_reached) {}

std::array<double, 3> ScaledProfile::series(double r) const {
  const double c2s = -0.25;
  const double r2 = r * r;
  const double v = r2 * (c2s + r2 * (c4_ + r2 * c6_));
  const double dv = r * (2 * c2s + r2 * (4 * c4_ + 6 * c6_ * r2));
  const double ddv = 2 * c2s + r2 * (12 * c4_ + 30 * c6_ * r2);
  return {v, dv, ddv};
}

const ScaledProfile::Segment* ScaledProfile::find_segment(double r1) const {
  if (segments_.empty() || r1 < segments_.front().r0) return nullptr;
  auto it = std::upper_bound(segments_.begin(), segments_.end(), r1,
                             [](double r, const Segment& s) { return r < s.r0; });
  return &*std::prev(it);
}

ProfileNode ScaledProfile::at(double r1) const {
  if (!(r1 >= 0.0) || r1 > r_max_ * (1 + 1e-14))
    throw std::out_of_range("r1 = " + format_double(r1) + " outside profile range [0, " +
                            format_double(r_max_) + "]");
  const Segment* seg = find_segment(r1);
  if (seg == nullptr) {
    auto s = series(r1);
    return {r1, s[0], s[1]};
  }
  const double t = std::clamp((r1 - seg->r0) / seg->h, 0.0, 1.0);
  const double t1 = 1.0 - t;
  ProfileNode out{r1, 0.0, 0.0};
  double* dst[2] = {&out.v1, &out.dv1};
  for (int i = 0; i < 2; ++i) {
    const auto& c = seg->cont;
    *dst[i] = c[0][i] + t * (c[1][i] + t1 * (c[2][i] + t * (c[3][i] + t1 * c[4][i])));
  }
  return out;
}

double ScaledProfile::source(double r1) const {
  return std::exp(source_exponent(a_, r1, v1(r1)));
}

double ScaledProfile::source_integral(double lo, double hi) const {
  static constexpr std::array<double, 4> x = {0.1834346424956498, 0.5255324099163290,
                                              0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> w = {0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double sgn : {-1.0, 1.0}) {
      const double s = mid + sgn * half * x[i];
      sum += w[i] * s * source(s);
    }
  }
  return half * sum;
}

double ScaledProfile::enclosed_source(double r1) const {
  const Segment* seg = find_segment(r1);
  if (seg == nullptr) return source_integral(0.0, r1);
  return seg->enclosed + source_integral(seg->r0, r1);
}

double ScaledProfile::residual(double r1) const {
  const double flux = r1 * dv1(r1);
  return std::abs(flux + enclosed_source(r1)) / std::max(1.0, std::abs(flux));
}

ScaledProfile integrate_family(double a, double r1_end, double tol) {
  if (!std::isfinite(a)) throw std::invalid_argument("source parameter a must be finite");
  if (!(r1_end > 0.0) || !std::isfinite(r1_end))
    throw std::invalid_argument("r1_end must be positive");
  if (!(tol >= 1e-14 && tol <= 1e-4))
    throw std::invalid_argument("tol must lie in [1e-14, 1e-4]");

  ScaledProfile prof;
  prof.a_ = a;
  prof.tol_ = tol;
  const double b = a + 0.25;
  prof.c4_ = -b / 16.0;
  prof.c6_ = (prof.c4_ - 0.5 * b * b) / 36.0;

  double r_start = 1e-2;
  if (prof.c4_ != 0.0) r_start = std::min(r_start, std::pow(tol / std::abs(prof.c4_), 0.25));
  r_start = std::min(r_start, r1_end);
  prof.r_start_ = r_start;
  prof.nodes_.push_back({0.0, 0.0, 0.0});

  auto s0 = prof.series(r_start);
  State y{s0[0], s0[1]};
  double r = r_start;
  prof.nodes_.push_back({r, y[0], y[1]});
  prof.r_max_ = r;
  if (r >= r1_end) return prof;

  const double min_step = kMinStepFraction * r1_end;
  double h = std::min(0.1 * r_start + 1e-3, r1_end - r);
  State k1 = rhs(a, r, y);
  double err_old = 1e-4;

  for (std::size_t step = 0;; ++step) {
    if (step > kMaxSteps) throw ToleranceFailure("step budget exhausted before r1_end");
    if (r + h > r1_end) h = r1_end - r;
    if (h < min_step) throw BlowUp(r, a);

    State yt, k2, k3, k4, k5, k6, k7, ynew;
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * a21 * k1[i];
    k2 = rhs(a, r + c2 * h, yt);
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(a, r + c3 * h, yt);
    for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(a, r + c4 * h, yt);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(a, r + c5 * h, yt);
    for (int i = 0; i < 2; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(a, r + h, yt);
    for (int i = 0; i < 2; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = rhs(a, r + h, ynew);

    double err = 0.0;
    bool ok = finite(ynew) && finite(k7);
    if (ok) {
      for (int i = 0; i < 2; ++i) {
        const double e =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / 2.0);
      ok = std::isfinite(err);
    }
    if (!ok) {
      h *= 0.25;
      continue;
    }

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    ScaledProfile::Segment seg{r, h, {}};
    for (int i = 0; i < 2; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      seg.cont[0][i] = y[i];
      seg.cont[1][i] = ydiff;
      seg.cont[2][i] = bspl;
      seg.cont[3][i] = ydiff - h * k7[i] - bspl;
      seg.cont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                            d7 * k7[i]);
    }
    seg.enclosed = prof.segments_.empty()
                       ? prof.source_integral(0.0, r)
                       : prof.segments_.back().enclosed +
                             prof.source_integral(prof.segments_.back().r0, r);
    prof.segments_.push_back(seg);
    r = (r + h >= r1_end) ? r1_end : r + h;
    y = ynew;
    k1 = k7;
    prof.nodes_.push_back({r, y[0], y[1]});
    prof.r_max_ = r;

    if (source_exponent(a, r, y[0]) > std::log(kSourceLimit)) throw BlowUp(r, a);
    if (r >= r1_end) break;

    // PI step-size control (Hairer, beta = 0.04).
    const double fac = 0.9 * std::pow(err, -0.17) * std::pow(err_old, 0.04);
    err_old = std::max(err, 1e-4);
    h *= std::clamp(fac, 0.2, 5.0);
  }
  return prof;
}

void write_profile_csv(const ScaledProfile& profile, std::ostream& out) {
  out << "# qvortex profile v1 a=" << format_double(profile.a())
      << " tol=" << format_double(profile.tol()) << "\n";
  out << "r1,v1,dv1\n";
  for (const auto& n : profile.nodes())
    out << format_double(n.r1) << ',' << format_double(n.v1) << ',' << format_double(n.dv1)
        << '\n';
}

}  // namespace qvortex
