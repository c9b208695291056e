#include "qvortex/selfconsistent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qvortex/io.hpp"

namespace qvortex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxRefine = 300;

struct Trial {
  double a = 0.0;
  bool reachable = false;
  double h = kInf;  // a - mu v'(z; a)/z, +inf when the profile blows up before z
  std::optional<ScaledProfile> profile;
};

class Evaluator {
 public:
  Evaluator(double mu, double z, double tol)
      : mu_(mu), z_(z), tol_(tol), ode_tol_(std::clamp(0.1 * tol, 1e-13, 1e-6)) {}

  Trial operator()(double a) {
    ++count;
    Trial t;
    t.a = a;
    try {
      t.profile = integrate_family(a, z_, ode_tol_);
    } catch (const BlowUp&) {
      return t;
    } catch (const ToleranceFailure&) {
      return t;
    }
    t.reachable = true;
    t.h = a - mu_ * t.profile->nodes().back().dv1 / z_;
    return t;
  }

  bool converged(const Trial& t) const {
    return t.reachable && z_ * std::abs(t.h) <= tol_ * std::max(1.0, std::abs(t.a * z_));
  }

  int count = 0;

 private:
  double mu_, z_, tol_, ode_tol_;
};

struct Bracket {
  Trial neg;  // h <= 0
  Trial pos;  // h > 0, possibly +inf (unreachable side)
};

ConsistentState make_state(double mu, double z, Trial&& t, int evals, bool multiple) {
  ConsistentState s;
  s.mu = mu;
  s.z = z;
  s.a = t.a;
  s.profile = std::move(*t.profile);
  s.v1_z = s.profile.nodes().back().v1;
  s.v1p_z = s.profile.nodes().back().dv1;
  s.residual = std::abs(s.a * z - mu * s.v1p_z);
  s.evaluations = evals;
  s.multiple_roots = multiple;
  return s;
}

// Between a reachable point with h <= 0 and a more positive unreachable one,
// find a reachable point with h > 0 (h diverges as the blow-up threshold nears).
std::optional<Bracket> resolve_edge(Evaluator& eval, Trial neg, double unreachable_a) {
  double hi = unreachable_a;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (neg.a + hi);
    if (mid == neg.a || mid == hi) break;
    Trial t = eval(mid);
    if (!t.reachable) {
      hi = mid;
    } else if (t.h > 0) {
      return Bracket{std::move(neg), std::move(t)};
    } else {
      neg = std::move(t);
      if (eval.converged(neg)) return Bracket{neg, neg};
    }
  }
  return std::nullopt;
}

// Illinois-modified regula falsi with bisection fallback.
std::optional<Trial> refine(Evaluator& eval, Bracket br) {
  if (eval.converged(br.neg)) return std::move(br.neg);
  if (eval.converged(br.pos)) return std::move(br.pos);
  int last_side = 0;
  double width = std::abs(br.pos.a - br.neg.a);
  double hn = br.neg.h, hp = br.pos.h;  // Illinois-scaled copies
  for (int it = 0; it < kMaxRefine; ++it) {
    const double lo = br.neg.a, hi = br.pos.a;
    double x = 0.5 * (lo + hi);
    const bool bisect = (it % 4 == 3) && std::abs(hi - lo) > 0.5 * width;
    if (std::isfinite(hp) && !bisect) {
      x = lo - hn * (hi - lo) / (hp - hn);
      if (!(x > std::min(lo, hi) && x < std::max(lo, hi))) x = 0.5 * (lo + hi);
    }
    if (it % 4 == 3) width = std::abs(hi - lo);
    if (x == lo || x == hi) return std::nullopt;

    Trial t = eval(x);
    if (eval.converged(t)) return t;
    if (!t.reachable || t.h > 0) {
      br.pos = std::move(t);
      hp = br.pos.h;
      if (last_side == 1 && std::isfinite(hn)) hn *= 0.5;
      last_side = 1;
    } else {
      br.neg = std::move(t);
      hn = br.neg.h;
      if (last_side == -1 && std::isfinite(hp)) hp *= 0.5;
      last_side = -1;
    }
  }
  return std::nullopt;
}

std::optional<Bracket> warm_bracket(Evaluator& eval, double seed) {
  seed = std::min(seed, 0.0);
  Trial t0 = eval(seed);
  if (!t0.reachable) return std::nullopt;
  if (eval.converged(t0)) return Bracket{t0, t0};
  double step = 1e-2 * std::max(std::abs(seed), 1e-2);
  Trial prev = std::move(t0);
  for (int i = 0; i < 40; ++i, step *= 2) {
    if (prev.h > 0) {
      const double a = prev.a - step;
      if (a < kBracketFloor) return std::nullopt;
      Trial t = eval(a);
      if (!t.reachable) return std::nullopt;
      if (t.h <= 0) return Bracket{std::move(t), std::move(prev)};
      prev = std::move(t);
    } else {
      if (prev.a >= 0.0) return std::nullopt;
      const double a = std::min(prev.a + step, 0.0);
      Trial t = eval(a);
      if (!t.reachable) return resolve_edge(eval, std::move(prev), a);
      if (t.h > 0) return Bracket{std::move(prev), std::move(t)};
      prev = std::move(t);
    }
  }
  return std::nullopt;
}

}  // namespace

Unreachable::Unreachable(double z, double mu)
    : std::runtime_error(
          "z = " + format_double(z) + " is unreachable for mu = " + format_double(mu) +
          (mu == 0.0 ? " (the mu = 0 profile is singular at r1 = 2*sqrt(2) ~ 2.8284)" : "")),
      z_(z) {}

ConsistentState solve_state(double mu, double z, const SolveOptions& options) {
  if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument("z must be positive");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be non-negative");
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");

  Evaluator eval(mu, z, options.tol);

  if (mu == 0.0) {
    Trial t = eval(0.0);
    if (!t.reachable) throw Unreachable(z, mu);
    return make_state(mu, z, std::move(t), eval.count, false);
  }

  if (options.warm_start) {
    if (auto br = warm_bracket(eval, *options.warm_start)) {
      if (auto root = refine(eval, std::move(*br)))
        return make_state(mu, z, std::move(*root), eval.count, false);
    }
  }

  // Global scan 0, -1/64, -1/32, ..., -64.
  std::vector<Trial> scan;
  scan.push_back(eval(0.0));
  for (double a = -1.0 / 64; a >= kBracketFloor; a *= 2) scan.push_back(eval(a));

  if (std::none_of(scan.begin(), scan.end(), [](const Trial& t) { return t.reachable; }))
    throw Unreachable(z, mu);

  for (auto& t : scan)
    if (eval.converged(t)) return make_state(mu, z, std::move(t), eval.count, false);

  // Candidate brackets in order of distance from a = 0.
  struct Candidate {
    std::size_t neg, pos;
    bool edge;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 1; i < scan.size(); ++i) {
    const Trial& hi = scan[i - 1];
    const Trial& lo = scan[i];
    if (!lo.reachable) continue;
    if (!hi.reachable) {
      if (lo.h <= 0) cands.push_back({i, i - 1, true});
    } else if ((hi.h > 0) != (lo.h > 0)) {
      if (lo.h <= 0)
        cands.push_back({i, i - 1, false});
      else
        cands.push_back({i - 1, i, false});
    }
  }
  if (cands.empty())
    throw NoBracket("no sign change of a - mu v'(z)/z on [" + format_double(kBracketFloor) +
                    ", 0] for mu = " + format_double(mu) + ", z = " + format_double(z));

  const bool multiple = cands.size() > 1;
  for (const auto& c : cands) {
    std::optional<Bracket> br;
    if (c.edge)
      br = resolve_edge(eval, scan[c.neg], scan[c.pos].a);
    else
      br = Bracket{scan[c.neg], scan[c.pos]};
    if (!br) continue;
    if (auto root = refine(eval, std::move(*br)))
      return make_state(mu, z, std::move(*root), eval.count, multiple);
    throw ToleranceFailure("self-consistency stalled before reaching tol = " +
                           format_double(options.tol) + " at mu = " + format_double(mu) +
                           ", z = " + format_double(z));
  }
  throw NoBracket("bracket collapsed onto the blow-up threshold for mu = " + format_double(mu) +
                  ", z = " + format_double(z));
}

}  // namespace qvortex
