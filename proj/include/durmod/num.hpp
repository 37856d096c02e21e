#ifndef DURMOD_NUM_HPP
#define DURMOD_NUM_HPP

// Small numeric helpers shared across the library: special functions,
// log-space products and the durability-nines transform.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace durmod::num {

// Regularized incomplete beta I_x(a,b). Thin wrapper so callers do not
// depend on the backing implementation directly.
double reg_beta(double a, double b, double x);

// Complement 1 - I_x(a,b), computed without cancellation.
double reg_beta_c(double a, double b, double x);

// Upper regularized incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a).
double reg_gamma_upper(double a, double x);

double lgamma_fn(double x);
double tgamma_fn(double x);

// Exact binomial coefficient in double; throws on overflow past 2^63.
double binomial(int n, int k);

// Product of many small positive rates, accumulated in log space.
// Returns exp(sum log x_i); exact zeros propagate to zero.
double stable_product(const std::vector<double>& xs, std::size_t begin, std::size_t end);

// floor(log10(1/(1 - e^{-horizon/mttdl}))), saturated at max_nines.
int durability_nines(double mttdl, double horizon, int max_nines = 18);

// 1 - (1-p)^n evaluated in log space, accurate for tiny p.
double one_minus_pow(double p, double n);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace durmod::num

#endif
