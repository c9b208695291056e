#include "qvortex/model.hpp"

#include <cmath>

namespace qvortex {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}

std::vector<std::string> check(const ModelParams& p) {
  std::vector<std::string> out;
  if (!positive(p.lambda_total)) out.emplace_back("lambda_total must be positive");
  if (!positive(p.epsilon)) out.emplace_back("epsilon must be positive");
  if (!positive(p.gamma)) out.emplace_back("gamma must be positive");
  if (!positive(p.alpha)) out.emplace_back("alpha must be positive");
  if (!positive(p.radius)) out.emplace_back("radius must be positive");
  if (!std::isfinite(p.mu) || p.mu < 0.0) out.emplace_back("mu must be non-negative");
  if (positive(p.gamma) && positive(p.lambda_total) && p.gamma > p.lambda_total)
    out.emplace_back("gamma exceeds total circulation");
  return out;
}

const ModelParams& validate(const ModelParams& params) {
  auto problems = check(params);
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return params;
}

double mu_from_mu_prime(double mu_prime, const ModelParams& params) {
  if (!std::isfinite(mu_prime) || mu_prime < 0.0)
    throw std::invalid_argument("mu_prime must be non-negative");
  validate(params);
  return params.epsilon * mu_prime * params.radius * params.radius / (2.0 * params.lambda_total);
}

double mu_prime_from_mu(double mu, const ModelParams& params) {
  if (!std::isfinite(mu) || mu < 0.0) throw std::invalid_argument("mu must be non-negative");
  validate(params);
  return 2.0 * params.lambda_total * mu / (params.epsilon * params.radius * params.radius);
}

}  // namespace qvortex
