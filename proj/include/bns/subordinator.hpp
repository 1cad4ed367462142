#pragma once

#include <string>

#include "bns/rng.hpp"

namespace bns {

// Levy subordinator driving the variance process. Two families:
//  - compound Poisson with exponential jumps: rate a, jump scale 1/b
//    (E[Z_1] = a/b, Var[Z_1] = 2a/b^2)
//  - gamma process: shape g, rate r per unit time
//    (E[Z_1] = g/r, Var[Z_1] = g/r^2)
struct SubordinatorSpec {
  enum class Family { kCompoundPoissonExp, kGamma };

  Family family = Family::kCompoundPoissonExp;
  double a = 1.0;      // CPE jump rate per unit subordinator time
  double b = 2.0;      // CPE exponential jump rate (jump mean 1/b)
  double shape = 1.0;  // gamma family
  double rate = 1.0;

  void validate() const;
  double mean_rate() const;  // E[Z_1]
  double var_rate() const;   // Var[Z_1]

  static SubordinatorSpec cpe(double a, double b);
  static SubordinatorSpec gamma_process(double shape, double rate);

  std::string family_name() const;
};

// Increment of Z over dt_sub units of subordinator time. Non-negative;
// dt_sub = 0 yields exactly 0.
double sample_increment(const SubordinatorSpec& spec, double dt_sub,
                        RngStream& rng);

}  // namespace bns
