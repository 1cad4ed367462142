#include "bns/subordinator.hpp"

#include <stdexcept>

namespace bns {

void SubordinatorSpec::validate() const {
  if (family == Family::kCompoundPoissonExp) {
    if (a <= 0.0 || b <= 0.0)
      throw std::invalid_argument("subordinator: CPE needs a > 0 and b > 0");
  } else {
    if (shape <= 0.0 || rate <= 0.0)
      throw std::invalid_argument("subordinator: gamma needs shape > 0 and rate > 0");
  }
}

double SubordinatorSpec::mean_rate() const {
  return family == Family::kCompoundPoissonExp ? a / b : shape / rate;
}

double SubordinatorSpec::var_rate() const {
  return family == Family::kCompoundPoissonExp ? 2.0 * a / (b * b)
                                               : shape / (rate * rate);
}

SubordinatorSpec SubordinatorSpec::cpe(double a, double b) {
  SubordinatorSpec s;
  s.family = Family::kCompoundPoissonExp;
  s.a = a;
  s.b = b;
  s.validate();
  return s;
}

SubordinatorSpec SubordinatorSpec::gamma_process(double shape, double rate) {
  SubordinatorSpec s;
  s.family = Family::kGamma;
  s.shape = shape;
  s.rate = rate;
  s.validate();
  return s;
}

std::string SubordinatorSpec::family_name() const {
  return family == Family::kCompoundPoissonExp ? "compound-poisson-exponential"
                                               : "gamma";
}

double sample_increment(const SubordinatorSpec& spec, double dt_sub,
                        RngStream& rng) {
  if (dt_sub < 0.0) throw std::invalid_argument("sample_increment: dt_sub < 0");
  if (dt_sub == 0.0) return 0.0;
  spec.validate();
  if (spec.family == SubordinatorSpec::Family::kCompoundPoissonExp) {
    long n = rng.poisson(spec.a * dt_sub);
    double total = 0.0;
    for (long i = 0; i < n; ++i) total += rng.exponential(spec.b);
    return total;
  }
  return rng.gamma(spec.shape * dt_sub, spec.rate);
}

}  // namespace bns
