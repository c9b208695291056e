#ifndef QVORTEX_MODEL_HPP
#define QVORTEX_MODEL_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace qvortex {

// Physical constants of the filament ensemble in natural units.
//   lambda_total  total circulation (Lambda = Gamma * N)
//   epsilon       inverse coupling constant
//   gamma         circulation carried by a single filament
//   alpha         core elasticity, log(b/a) + 1
//   radius        confinement radius R
//   mu            dimensionless confinement strength eps*mu'*R^2/(2*Lambda)
struct ModelParams {
  double lambda_total = 1.0;
  double epsilon = 1.0;
  double gamma = 1.0;
  double alpha = 1.0;
  double radius = 1.0;
  double mu = 0.0;
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Every violated invariant, one message each. Empty when the parameters are valid.
std::vector<std::string> check(const ModelParams& params);

// Returns params unchanged or throws ValidationError listing all violations.
const ModelParams& validate(const ModelParams& params);

// mu = eps * mu' * R^2 / (2 Lambda)
double mu_from_mu_prime(double mu_prime, const ModelParams& params);
double mu_prime_from_mu(double mu, const ModelParams& params);

}  // namespace qvortex

#endif
