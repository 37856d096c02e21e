#include "durmod/coldstore.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "durmod/num.hpp"

namespace durmod::coldstore {

namespace {

std::uint64_t u_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // Overflow-checked; the state counters here stay far below 2^64 for any
  // practical (n-k, s).
  unsigned __int128 r = 1;
  for (int i = 0; i < k; ++i) {
    r *= unsigned(n - i);
    r /= unsigned(i + 1);
  }
  if (r > ~0ull) throw std::overflow_error("binomial overflow");
  return std::uint64_t(r);
}

}  // namespace

void validate(const ColdModel& m) {
  if (m.n <= m.k || m.k < 1) throw std::invalid_argument("ColdModel: need n > k >= 1");
  if (!(m.lambda > 0.0) || !(m.mu > 0.0) || !(m.theta > 0.0))
    throw std::invalid_argument("ColdModel: lambda, mu, theta must be positive");
  if (m.media.eta < 0.0 || m.media.eta > 1.0)
    throw std::invalid_argument("ColdModel: eta outside [0,1]");
}

std::uint64_t ns_count(int n, int k, int s) {
  if (s < 2 || n <= k || k < 0) throw std::invalid_argument("ns_count: need s >= 2, n > k >= 0");
  return u_binomial(n - k + s - 1, n - k) + 1;
}

NsBounds ns_bounds(int n, int k, int s) {
  if (s < 2 || n <= k || k < 0) throw std::invalid_argument("ns_bounds: need s >= 2, n > k >= 0");
  NsBounds b;
  for (int j = 0; j <= s - 1; ++j) b.lower += u_binomial(n - k + 1, j);
  b.upper = u_binomial(s + n - k, s - 1);
  return b;
}

std::vector<ColdState> enumerate_states(int n, int k) {
  if (n <= k || k < 1) throw std::invalid_argument("enumerate_states: need n > k >= 1");
  std::vector<ColdState> states;
  for (int i = n; i >= k; --i)
    for (int z = 0; z <= n - i; ++z) states.push_back({i, n - i - z, z});
  // c_ind order: increasing failure count, then detected count.
  return states;
}

int state_index(int n, const ColdState& st) {
  if (st.available + st.failed + st.detected != n || st.available < 0 || st.failed < 0 ||
      st.detected < 0)
    throw std::invalid_argument("state_index: inconsistent state");
  const int d = n - st.available;
  return int(u_binomial(d + 1, 2)) + st.detected + 1;
}

ColdState index_to_state(int n, int k, int index) {
  const int max_index = int(ns_count(n, k, 3)) - 1;
  if (index < 1 || index > max_index)
    throw std::out_of_range("index_to_state: index " + std::to_string(index) +
                            " outside 1.." + std::to_string(max_index));
  // Largest failure count d with C(d+1,2) < index, then read off z.
  int d = 0;
  while (int(u_binomial(d + 2, 2)) < index) ++d;
  const int z = index - int(u_binomial(d + 1, 2)) - 1;
  const ColdState st{n - d, d - z, z};
  if (st.available < k) throw std::out_of_range("index_to_state: below the data-loss boundary");
  return st;
}

double carrier_survival(int remaining, double omega, double t) {
  if (remaining < 1) throw std::domain_error("carrier_survival: remaining exchanges >= 1");
  if (!(omega > 0.0)) throw std::domain_error("carrier_survival: omega must be positive");
  if (t < 0.0) throw std::domain_error("carrier_survival: negative time");
  return num::reg_gamma_upper(double(remaining), omega * t);
}

std::vector<double> available_carriers_dist(const std::vector<double>& betas, int system_n,
                                            PoibinMethod method) {
  const int i = int(betas.size());
  for (double b : betas)
    if (b < 0.0 || b > 1.0)
      throw std::domain_error("available_carriers_dist: survival probability outside [0,1]");
  if (i == 0) return {1.0};

  std::vector<double> psi(std::size_t(i) + 1, 0.0);
  if (method == PoibinMethod::Convolution) {
    psi[0] = 1.0;
    for (int m = 0; m < i; ++m) {
      const double b = betas[std::size_t(m)];
      for (int o = m + 1; o >= 1; --o) psi[std::size_t(o)] = psi[std::size_t(o)] * (1.0 - b) + psi[std::size_t(o - 1)] * b;
      psi[0] *= (1.0 - b);
    }
  } else {
    const int roots = method == PoibinMethod::DftSystemSize ? system_n + 1 : i + 1;
    if (roots < i + 1)
      throw std::invalid_argument("available_carriers_dist: system_n smaller than carrier count");
    // CDF through the characteristic function on the unit circle; psi_o is
    // the difference of consecutive real parts.
    std::vector<std::complex<double>> cf(std::size_t(roots));
    for (int l = 0; l < roots; ++l) {
      const double angle = 2.0 * M_PI * double(l) / double(roots);
      const std::complex<double> wl(std::cos(angle), std::sin(angle));
      std::complex<double> prod(1.0, 0.0);
      for (double b : betas) prod *= (1.0 + (wl - 1.0) * b);
      cf[std::size_t(l)] = prod;
    }
    double prev_cdf = 0.0;
    for (int o = 0; o <= i; ++o) {
      std::complex<double> acc(0.0, 0.0);
      for (int l = 0; l < roots; ++l) {
        // geometric partial sum over x = 0..o of w^{-lx}
        const double angle = -2.0 * M_PI * double(l) / double(roots);
        std::complex<double> sum(0.0, 0.0);
        for (int x = 0; x <= o; ++x)
          sum += std::complex<double>(std::cos(angle * x), std::sin(angle * x));
        acc += sum * cf[std::size_t(l)];
      }
      const double cdf = std::clamp(acc.real() / double(roots), 0.0, 1.0);
      psi[std::size_t(o)] = std::max(cdf - prev_cdf, -1e-12);
      prev_cdf = cdf;
    }
  }
  for (double& v : psi) v = std::max(v, 0.0);
  return psi;
}

double harmonic_sum(std::uint64_t x) {
  if (x < 1) throw std::domain_error("harmonic_sum: x >= 1 required");
  if (x <= 1000000ull) {
    double acc = 0.0;
    for (std::uint64_t m = x; m >= 1; --m) acc += 1.0 / double(m);
    return acc;
  }
  const double xd = double(x);
  constexpr double euler_mascheroni = 0.5772156649015329;
  return std::log(xd) + euler_mascheroni + 1.0 / (2.0 * xd) - 1.0 / (12.0 * xd * xd) +
         1.0 / (120.0 * xd * xd * xd * xd);
}

double exp_tail_rate(double phi, const std::vector<double>& thetas) {
  if (!(phi > 0.0)) throw std::domain_error("exp_tail_rate: phi must be positive");
  double mean = 1.0 / phi;
  for (double th : thetas) {
    if (!(th > 0.0)) throw std::domain_error("exp_tail_rate: rates must be positive");
    mean += 1.0 / th;
  }
  return 1.0 / mean;
}

double detection_rate(int j, double theta, double phi, const std::vector<double>& betas_failed) {
  if (j < 0 || int(betas_failed.size()) != j)
    throw std::invalid_argument("detection_rate: need one beta per failed node");
  double missing = 0.0;
  for (double b : betas_failed) missing += 1.0 - b;
  return double(j) * theta - theta * theta / (theta + phi) * missing;
}

double write_rate(int z, double mu, double phi, const std::vector<double>& betas_detected,
                  int j_failed, RepairSumConvention conv) {
  double missing = 0.0;
  if (conv == RepairSumConvention::DetectedCount) {
    if (int(betas_detected.size()) != z)
      throw std::invalid_argument("write_rate: need one beta per detected node");
    for (double b : betas_detected) missing += 1.0 - b;
  } else {
    // Literal published form: sum over the failed count. Callers supply the
    // failed nodes' betas in betas_detected when using this convention.
    if (int(betas_detected.size()) != j_failed)
      throw std::invalid_argument("write_rate: need one beta per failed node");
    for (double b : betas_detected) missing += 1.0 - b;
  }
  return double(z) * mu - mu * mu / (mu + phi) * missing;
}

double repair_rate(int i, int z, double mu, double phi, int k,
                   const std::vector<double>& betas_available,
                   const std::vector<double>& betas_detected, int j_failed,
                   RepairSumConvention conv) {
  if (int(betas_available.size()) != i)
    throw std::invalid_argument("repair_rate: need one beta per available node");
  if (z < 1) return 0.0;
  const double mu_z = write_rate(z, mu, phi, betas_detected, j_failed, conv);
  if (mu_z <= 0.0) return 0.0;
  const auto psi = available_carriers_dist(betas_available, i, PoibinMethod::Convolution);
  double total = 0.0;
  for (int l = 0; l <= i; ++l) {  // l dead carriers among the i available
    const double pl = psi[std::size_t(i - l)];
    if (pl <= 0.0) continue;
    double inner = 0.0;
    for (int x = 0; x <= l && x <= k; ++x) {
      if (k - x > i - l) continue;
      const double hyper = num::binomial(i - l, k - x) * num::binomial(l, x) / num::binomial(i, k);
      if (hyper <= 0.0) continue;
      const double wait = 1.0 / mu_z + (x > 0 ? harmonic_sum(std::uint64_t(x)) / phi : 0.0);
      inner += hyper / wait;
    }
    total += pl * inner;
  }
  return total;
}

ctmc::RateModel hard_error_chain(const ColdModel& m) {
  validate(m);
  const int n = m.n, k = m.k;
  const auto states = enumerate_states(n, k);
  ctmc::RateModel rm;
  for (const auto& st : states)
    rm.states.push_back(std::to_string(st.available) + "A" + std::to_string(st.failed) + "F" +
                        std::to_string(st.detected) + "D");
  rm.states.push_back("F");
  const int F = int(states.size());
  rm.initial = 0;
  rm.absorbing = {F};
  rm.failure_level.resize(states.size() + 1);
  const auto pos = [&](const ColdState& st) { return state_index(n, st) - 1; };
  for (const auto& st : states) {
    const int a = pos(st);
    rm.failure_level[std::size_t(a)] = n - st.available;
    const double fail = double(st.available) * m.lambda;
    if (st.available > k) {
      const double di = errors::delta_i(st.available, k, m.media.eta);
      if (fail * di > 0.0) {
        rm.rates[{a, pos({st.available - 1, st.failed + 1, st.detected})}] = fail * di;
        rm.failure_edges.insert({a, pos({st.available - 1, st.failed + 1, st.detected})});
      }
      if (fail * (1.0 - di) > 0.0) {
        rm.rates[{a, F}] = fail * (1.0 - di);
        rm.failure_edges.insert({a, F});
      }
    } else {
      rm.rates[{a, F}] = fail;
      rm.failure_edges.insert({a, F});
    }
    if (st.failed > 0)
      rm.rates[{a, pos({st.available, st.failed - 1, st.detected + 1})}] =
          double(st.failed) * m.theta;
    if (st.detected > 0)
      rm.rates[{a, pos({st.available + 1, st.failed, st.detected - 1})}] =
          double(st.detected) * m.mu;
  }
  rm.failure_level[std::size_t(F)] = n - k + 1;
  ctmc::validate(rm);
  return rm;
}

double lower_bound(const ColdModel& m) {
  validate(m);
  const int n = m.n, k = m.k;
  const double eta = m.media.eta;
  double total = 0.0;
  for (int i = k; i <= n; ++i) {
    const double die_here = i == k ? 1.0 : 1.0 - errors::delta_i(i, k, eta);
    double survive_above = 1.0;
    for (int j = i + 1; j <= n; ++j) survive_above *= errors::delta_i(j, k, eta);
    const double hold = (harmonic_sum(std::uint64_t(n)) -
                         (i >= 2 ? harmonic_sum(std::uint64_t(i - 1)) : 0.0)) /
                        m.lambda;
    total += die_here * survive_above * hold;
  }
  return total;
}

double upper_bound(const ColdModel& m) {
  return ctmc::fundamental_matrix_mttdl(hard_error_chain(m)).mttdl;
}

}  // namespace durmod::coldstore
