#include "durmod/num.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <limits>

namespace durmod::num {

double reg_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double reg_beta_c(double a, double b, double x) {
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  return boost::math::ibetac(a, b, x);
}

double reg_gamma_upper(double a, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(a, x);
}

double lgamma_fn(double x) { return std::lgamma(x); }
double tgamma_fn(double x) { return std::tgamma(x); }

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * double(n - i) / double(i + 1);
  return r < 9.0e15 ? std::round(r) : r;
}

double stable_product(const std::vector<double>& xs, std::size_t begin, std::size_t end) {
  double logsum = 0.0;
  for (std::size_t i = begin; i < end && i < xs.size(); ++i) {
    if (xs[i] == 0.0) return 0.0;
    if (xs[i] < 0.0) throw std::domain_error("stable_product: negative factor");
    logsum += std::log(xs[i]);
  }
  return std::exp(logsum);
}

int durability_nines(double mttdl, double horizon, int max_nines) {
  if (!(mttdl > 0.0) || !(horizon > 0.0))
    throw std::domain_error("durability_nines: mttdl and horizon must be positive");
  const double unrel = -std::expm1(-horizon / mttdl);
  if (unrel <= 0.0) return max_nines;
  const int n = int(std::floor(std::log10(1.0 / unrel)));
  return std::clamp(n, 0, max_nines);
}

double one_minus_pow(double p, double n) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  return -std::expm1(n * std::log1p(-p));
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares: need >= 2 paired points");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("least_squares: degenerate abscissa");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = f.slope * x[i] + f.intercept;
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace durmod::num
