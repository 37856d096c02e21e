#include "durmod/avail.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "durmod/num.hpp"

namespace durmod::avail {

void validate(const AvailabilityParams& p) {
  if (!(p.lambda > 0.0)) throw std::invalid_argument("AvailabilityParams: lambda must be positive");
  if (!(p.t_up > 0.0) || p.t_down < 0.0)
    throw std::invalid_argument("AvailabilityParams: t_up > 0 and t_down >= 0 required");
  if (p.p13() > 1.0)
    throw std::invalid_argument("AvailabilityParams: lambda (t_up + t_down) exceeds 1");
}

NodeRates node_rates(const AvailabilityParams& p) {
  validate(p);
  NodeRates r;
  const double pa = p.p_a();
  r.lambda12 = (pa - p.lambda * p.t_up) / (p.t_up * pa);
  r.lambda13 = p.lambda / pa;
  r.lambda21 = p.t_down > 0.0 ? 1.0 / p.t_down : std::numeric_limits<double>::infinity();
  if (r.lambda12 < 0.0)
    throw std::invalid_argument("node_rates: lambda12 negative (lambda t_up too large)");
  r.p13 = r.lambda13 / (r.lambda12 + r.lambda13);
  return r;
}

double expected_timeout_life(double alpha, const AvailabilityParams& p) {
  validate(p);
  if (alpha < 0.0) throw std::domain_error("expected_timeout_life: alpha must be >= 0");
  if (alpha == 0.0) return p.t_up;
  const double p13 = p.p13();
  const double ea = std::exp(-alpha);
  const double one_m_ea = -std::expm1(-alpha);
  const double bracket = p.t_up + p.t_down * (1.0 - alpha * ea / one_m_ea);
  return (1.0 - p13) * one_m_ea * bracket / (p13 + (1.0 - p13) * ea) + p.t_up;
}

double solve_timeout_equation(const AvailabilityParams& base, double alpha, Unknown unknown) {
  const auto residual = [&](double x) {
    AvailabilityParams p = base;
    double a = alpha;
    if (unknown == Unknown::TUp)
      p.t_up = x;
    else
      a = x;
    return expected_timeout_life(a, p) + a * p.t_down - 1.0 / p.lambda;
  };
  double lo = unknown == Unknown::TUp ? 1e-3 : 1e-6;
  double hi = unknown == Unknown::TUp ? 1e9 : 1e3;
  double flo = residual(lo), fhi = residual(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0)
    throw std::runtime_error("solve_timeout_equation: no sign change on the search bracket");
  for (int it = 0; it < 500; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = residual(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
    if ((hi - lo) <= 1e-10 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Binomial CDF extended to a real argument through the regularized beta
// function; coincides with the usual CDF at integers.
double binom_cdf_cont(int n, double p, double j) {
  if (j < 0.0) return 0.0;
  if (j >= double(n)) return 1.0;
  return num::reg_beta(double(n) - j, j + 1.0, 1.0 - p);
}

struct CdfData {
  std::vector<double> log_value;  // log10 of distinct durations
  std::vector<double> cdf;        // empirical right-CDF at each value
  std::vector<double> weight;
};

double objective(const CdfData& d, int n, double p, double cu) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.log_value.size(); ++i) {
    const double pred = binom_cdf_cont(n, p, cu * d.log_value[i]);
    const double r = d.cdf[i] - pred;
    acc += d.weight[i] * r * r;
  }
  return acc;
}

}  // namespace

DowntimeFit fit_downtime_binomial(const std::vector<double>& durations) {
  if (durations.size() < 30)
    throw std::invalid_argument("fit_downtime_binomial: need at least 30 samples");
  for (double v : durations)
    if (!(v > 0.0)) throw std::invalid_argument("fit_downtime_binomial: nonpositive duration");

  std::map<double, long long> hist;
  for (double v : durations) ++hist[v];
  if (hist.size() < 2)
    throw std::invalid_argument("fit_downtime_binomial: degenerate data (all durations equal)");

  CdfData d;
  const double total = double(durations.size());
  long long cum = 0;
  for (const auto& [v, c] : hist) {
    cum += c;
    d.log_value.push_back(std::log10(v));
    d.cdf.push_back(double(cum) / total);
    d.weight.push_back(double(c) / total);
  }

  DowntimeFit best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int n = 5; n <= 30; ++n) {
    for (double cu = 0.5; cu <= 8.0001; cu += 0.05) {
      for (double p = 0.05; p <= 0.951; p += 0.01) {
        const double o = objective(d, n, p, cu);
        if (o < best.objective) {
          best.objective = o;
          best.n_trials = n;
          best.p = p;
          best.c_u = cu;
        }
      }
    }
  }
  // coordinate refinement around the coarse optimum
  for (int round = 0; round < 5; ++round) {
    double bp = best.p;
    for (double p = std::max(0.005, best.p - 0.02); p <= std::min(0.995, best.p + 0.02); p += 0.0005) {
      const double o = objective(d, best.n_trials, p, best.c_u);
      if (o < best.objective) {
        best.objective = o;
        bp = p;
      }
    }
    best.p = bp;
    double bc = best.c_u;
    for (double cu = std::max(0.1, best.c_u - 0.06); cu <= best.c_u + 0.06; cu += 0.001) {
      const double o = objective(d, best.n_trials, best.p, cu);
      if (o < best.objective) {
        best.objective = o;
        bc = cu;
      }
    }
    best.c_u = bc;
  }
  best.mean_downtime_hours =
      std::pow(10.0, double(best.n_trials) * best.p / best.c_u) / 3600.0;
  return best;
}

std::vector<double> read_downtime_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open downtime file: " + path);
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      std::size_t pos = 0;
      const double v = std::stod(line, &pos);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno));
    }
  }
  if (out.empty()) throw std::runtime_error(path + ": no samples");
  return out;
}

}  // namespace durmod::avail
