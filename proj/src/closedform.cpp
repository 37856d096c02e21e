#include "durmod/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "durmod/num.hpp"

namespace durmod::closedform {

double mttdl_exact(int m, int c, double lambda, double mu) {
  if (m < 1) throw std::invalid_argument("mttdl_exact: m >= 1 required");
  if (lambda <= 0.0 || mu < 0.0) throw std::invalid_argument("mttdl_exact: bad rates");
  const double md = double(m), l = lambda;
  switch (c) {
    case 1:
      return (mu + l * (2.0 * md + 1.0)) / (l * l * md * (md + 1.0));
    case 2:
      return (2.0 * mu * mu + mu * l * (5.0 * md + 6.0) + l * l * (3.0 * md * md + 6.0 * md + 2.0)) /
             (l * l * l * md * (md + 1.0) * (md + 2.0));
    case 3:
      return (6.0 * mu * mu * mu + mu * mu * l * (17.0 * md + 33.0) +
              mu * l * l * (14.0 * md * md + 47.0 * md + 33.0) +
              2.0 * l * l * l * (2.0 * md * md * md + 9.0 * md * md + 11.0 * md + 3.0)) /
             (l * l * l * l * md * (md + 1.0) * (md + 2.0) * (md + 3.0));
    default:
      throw std::invalid_argument("mttdl_exact: closed forms exist for c in {1,2,3}; use the "
                                  "generalized model or the chain solver for c=" + std::to_string(c));
  }
}

double mttdl_simple(int n, int c, double lambda, double mu) {
  if (c < 1 || c >= n) throw std::invalid_argument("mttdl_simple: need 1 <= c < n");
  if (lambda <= 0.0) throw std::invalid_argument("mttdl_simple: lambda must be positive");
  const double omega = mu / lambda;
  return std::pow(omega, c) / (lambda * double(n - c) * num::binomial(n, c));
}

double reliability_approx(int m, int c, double lambda, double mu, double t) {
  if (t < 0.0) throw std::domain_error("reliability_approx: negative time");
  const double md = double(m), l = lambda;
  if (c == 0) return std::exp(-md * l * t);
  if (c < 0 || c > 3)
    throw std::invalid_argument("reliability_approx: approximations exist for c in {0,1,2,3}");

  const double omega = mu / lambda;
  double pochhammer = md;  // m(m+1)...(m+c)
  double inv_sum = 0.0;    // 1 + 1/2 + ... + 1/c
  for (int i = 1; i <= c; ++i) {
    pochhammer *= (md + double(i));
    inv_sum += 1.0 / double(i);
  }
  const double c0 = 1.0 + inv_sum * md * num::binomial(m + c, c) * std::pow(omega, -c - 1);
  double r = c0 * std::exp(-t / mttdl_exact(m, c, lambda, mu));
  if (c == 1) {
    r -= (l * l * md * (md + 1.0) / (mu * mu)) * std::exp(-t * (mu + l * (2.0 * md + 1.0)));
  } else if (c == 2) {
    const double lead = l * l * l * md * (md + 1.0) * (md + 2.0) / (mu * mu * mu);
    r -= lead * std::exp(-t * (mu + l * (2.0 * md + 3.0)));
    r -= (lead / 4.0) * std::exp(-t * (2.0 * mu + l * md));
  } else {
    const double lead = std::pow(l, 4) * pochhammer / std::pow(mu, 4);
    r -= (lead / 2.0) * std::exp(-t * (mu + l * (2.0 * md + 5.0)));
    r -= (lead / 4.0) * std::exp(-t * (2.0 * mu + l * (md + 1.0)));
    r -= (lead / 18.0) * std::exp(-t * (3.0 * mu + l * md));
  }
  return std::clamp(r, 0.0, 1.0);
}

double mttdl_hard_error(int n, int c, double lambda, double mu, double eta) {
  if (c < 1 || c >= n) throw std::invalid_argument("mttdl_hard_error: need 1 <= c < n");
  if (lambda <= 0.0 || eta < 0.0 || eta > 1.0)
    throw std::invalid_argument("mttdl_hard_error: bad parameters");
  const double omega = mu / lambda;
  double fact = 1.0, prod = 1.0;
  for (int i = 1; i <= c; ++i) fact *= double(i);
  for (int i = 0; i <= c; ++i) prod *= double(n - i);
  return fact * std::pow(omega, c) / (prod * (lambda + eta * mu));
}

void validate(const GeneralRates& r) {
  const int c = r.c();
  if (c < 1) throw std::invalid_argument("GeneralRates: need c >= 1 (mus nonempty)");
  if (int(r.lambdas.size()) != c + 1 || int(r.gammas.size()) != c + 1)
    throw std::invalid_argument("GeneralRates: lambdas and gammas must have c+1 entries");
  for (double v : r.lambdas)
    if (!(v >= 0.0)) throw std::invalid_argument("GeneralRates: negative lambda");
  for (double v : r.gammas)
    if (!(v >= 0.0)) throw std::invalid_argument("GeneralRates: negative gamma");
  for (double v : r.mus)
    if (!(v >= 0.0)) throw std::invalid_argument("GeneralRates: negative mu");
  for (int i = 0; i < c; ++i)
    if (r.lambdas[std::size_t(i)] + r.gammas[std::size_t(i)] <= 0.0)
      throw std::invalid_argument("GeneralRates: state " + std::to_string(i) + " has no exit");
  if (r.lambdas[std::size_t(c)] + r.gammas[std::size_t(c)] <= 0.0)
    throw std::invalid_argument("GeneralRates: terminal state has no exit");
}

bool lemma3_condition_holds(const GeneralRates& r) {
  const int c = r.c();
  for (int i = 0; i + 4 <= c; ++i)
    if (r.gammas[std::size_t(i)] != 0.0) return false;
  return true;
}

double mttdl_general(const GeneralRates& rates, GeneralMode mode) {
  validate(rates);
  if (mode == GeneralMode::ExactLemma3 && !lemma3_condition_holds(rates))
    throw std::invalid_argument(
        "mttdl_general: exact-lemma3 requires gammas[0..c-4] to vanish; use Approx or the chain solver");

  const int c = rates.c();
  // Work on rates scaled by 1/s so products of c+1 factors stay in range;
  // the final MTTDL picks the scale back up.
  const double s = *std::max_element(rates.lambdas.begin(), rates.lambdas.end());
  if (s <= 0.0) throw std::invalid_argument("mttdl_general: all lambdas zero");
  std::vector<long double> lam(std::size_t(c) + 1), gam(std::size_t(c) + 1);
  std::vector<long double> mu(static_cast<std::size_t>(c));
  for (int i = 0; i <= c; ++i) {
    lam[std::size_t(i)] = (long double)(rates.lambdas[std::size_t(i)] / s);
    gam[std::size_t(i)] = (long double)(rates.gammas[std::size_t(i)] / s);
  }
  // A nonzero terminal gamma exits to the same place as lambda_c; fold it.
  lam[std::size_t(c)] += gam[std::size_t(c)];
  gam[std::size_t(c)] = 0.0L;
  for (int i = 0; i < c; ++i) mu[std::size_t(i)] = (long double)(rates.mus[std::size_t(i)] / s);

  // phi_c(0) = prod lambda + D_c with
  //   D_t = (mu_{t-1}+lambda_t) (D_{t-1} + gamma_{t-1} (prod_{i<=t-2}(gamma_i+lambda_i) + xi_t)),
  // which keeps every term nonnegative (no cancellation).
  long double D = 0.0L;
  long double prod_lam = lam[0];       // prod_{i=0}^{t-1} lambda_i entering step t
  long double prod_lg = 1.0L;          // prod_{i=0}^{t-2} (gamma_i + lambda_i)
  std::vector<long double> lam_prefix{1.0L};  // lam_prefix[t] = prod_{i<t} lambda_i
  lam_prefix.push_back(lam[0]);
  for (int t = 1; t <= c; ++t) {
    long double xi = 0.0L;
    if (mode == GeneralMode::ExactLemma3 && t >= 3)
      xi = gam[std::size_t(t - 3)] * mu[std::size_t(t - 3)] * lam_prefix[std::size_t(t - 3)];
    D = (mu[std::size_t(t - 1)] + lam[std::size_t(t)]) *
        (D + gam[std::size_t(t - 1)] * (prod_lg + xi));
    prod_lg *= (gam[std::size_t(t - 1)] + lam[std::size_t(t - 1)]);
    prod_lam *= lam[std::size_t(t)];
    lam_prefix.push_back(prod_lam);
  }
  const long double phi = prod_lam + D;
  if (!(phi > 0.0L)) throw std::runtime_error("mttdl_general: vanishing phi_c(0)");

  // Entry j of the key rate vector for cut x: lambda_j below the cut,
  // lambda_j + (repair + gamma feed) at and above it.
  std::vector<long double> add(std::size_t(c) + 1);
  add[0] = gam[0];
  for (int j = 1; j < c; ++j) add[std::size_t(j)] = mu[std::size_t(j - 1)] + gam[std::size_t(j)];
  add[std::size_t(c)] = mu[std::size_t(c - 1)];

  long double total = 0.0L;
  for (int x = 0; x <= c; ++x) {
    long double logp = 0.0L;
    bool zero = false;
    for (int j = 0; j <= c; ++j) {
      if (j == x) continue;
      const long double v = lam[std::size_t(j)] + (j >= x ? add[std::size_t(j)] : 0.0L);
      if (v <= 0.0L) {
        zero = true;
        break;
      }
      logp += std::log(v);
    }
    if (!zero) total += std::exp(logp);
  }
  return double(total / phi / (long double)s);
}

ctmc::RateModel to_rate_model(const GeneralRates& rates) {
  validate(rates);
  const int c = rates.c();
  ctmc::RateModel m;
  for (int i = 0; i <= c; ++i) m.states.push_back(std::to_string(i) + "failed");
  m.states.push_back("F");
  const int F = c + 1;
  m.initial = 0;
  m.absorbing = {F};
  m.failure_level.resize(std::size_t(c) + 2);
  for (int i = 0; i <= c; ++i) m.failure_level[std::size_t(i)] = i;
  m.failure_level[std::size_t(F)] = c + 1;
  for (int i = 0; i < c; ++i) {
    if (rates.lambdas[std::size_t(i)] > 0.0) {
      m.rates[{i, i + 1}] = rates.lambdas[std::size_t(i)];
      m.failure_edges.insert({i, i + 1});
    }
    if (rates.gammas[std::size_t(i)] > 0.0) {
      m.rates[{i, F}] = rates.gammas[std::size_t(i)];
      m.failure_edges.insert({i, F});
    }
    if (rates.mus[std::size_t(i)] > 0.0) m.rates[{i + 1, 0}] = rates.mus[std::size_t(i)];
  }
  const double exit = rates.lambdas[std::size_t(c)] + rates.gammas[std::size_t(c)];
  if (exit > 0.0) {
    m.rates[{c, F}] = exit;
    m.failure_edges.insert({c, F});
  }
  ctmc::validate(m);
  return m;
}

GeneralRates canonical_rates(int m, int c, double lambda, double mu) {
  if (m < 1 || c < 1) throw std::invalid_argument("canonical_rates: need m >= 1, c >= 1");
  const int n = m + c;
  GeneralRates r;
  for (int i = 0; i <= c; ++i) {
    r.lambdas.push_back(double(n - i) * lambda);
    r.gammas.push_back(0.0);
  }
  for (int i = 0; i < c; ++i) r.mus.push_back(double(i + 1) * mu);
  return r;
}

}  // namespace durmod::closedform
