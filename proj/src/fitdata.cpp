#include "durmod/fitdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "durmod/num.hpp"

namespace durmod::fitdata {

void validate(const WeibullParams& p) {
  if (!(p.shape > 0.0) || !std::isfinite(p.shape) || !(p.scale > 0.0) || !std::isfinite(p.scale))
    throw std::invalid_argument("WeibullParams: shape and scale must be positive and finite");
}

std::vector<long long> ingest_exchange_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open exchange log: " + path);
  std::vector<long long> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    long long v = 0;
    try {
      std::size_t pos = 0;
      v = std::stoll(line, &pos);
      while (pos < line.size() && std::isspace((unsigned char)line[pos])) ++pos;
      if (pos != line.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": parse error at line " + std::to_string(lineno));
    }
    if (v <= 0)
      throw std::runtime_error(path + ": nonpositive exchange count at line " +
                               std::to_string(lineno));
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error(path + ": empty exchange log");
  return out;
}

WeibullFit fit_weibull_real(const std::vector<double>& samples, PlottingPositions positions) {
  if (samples.size() < 10) throw std::invalid_argument("fit_weibull: need at least 10 samples");
  std::vector<double> t(samples);
  for (double v : t)
    if (!(v > 0.0)) throw std::invalid_argument("fit_weibull: nonpositive sample");
  std::sort(t.begin(), t.end());
  if (t.front() == t.back())
    throw std::invalid_argument("fit_weibull: degenerate data (all samples equal)");

  const double N = double(t.size());
  std::vector<double> x, y;
  x.reserve(t.size());
  y.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double w = positions == PlottingPositions::MedianRanks
                         ? (double(i) + 1.0 - 0.3) / (N + 0.4)
                         : (double(i) + 1.0) / (N + 1.0);
    x.push_back(std::log(t[i]));
    y.push_back(std::log(-std::log1p(-w)));
  }
  const auto lf = num::least_squares(x, y);
  WeibullFit fit;
  fit.params.shape = lf.slope;
  fit.params.scale = std::exp(-lf.intercept / lf.slope);
  fit.r2 = lf.r2;
  fit.n_samples = t.size();
  validate(fit.params);
  fit.mean_exchanges = weibull_mean(fit.params);
  return fit;
}

WeibullFit fit_weibull(const std::vector<long long>& samples, PlottingPositions positions) {
  std::vector<double> real(samples.begin(), samples.end());
  return fit_weibull_real(real, positions);
}

double weibull_mean(const WeibullParams& p) {
  validate(p);
  return p.scale * num::tgamma_fn(1.0 + 1.0 / p.shape);
}

double weibull_quantile(const WeibullParams& p, double u) {
  validate(p);
  if (u < 0.0 || u >= 1.0) throw std::domain_error("weibull_quantile: u outside [0,1)");
  return p.scale * std::pow(-std::log1p(-u), 1.0 / p.shape);
}

double sample_weibull_real(const WeibullParams& p, std::mt19937_64& rng) {
  return weibull_quantile(p, std::generate_canonical<double, 53>(rng));
}

long long sample_weibull(const WeibullParams& p, std::mt19937_64& rng) {
  const double v = sample_weibull_real(p, rng);
  return std::max(1ll, (long long)std::ceil(v));
}

std::string fit_to_json(const WeibullFit& fit) {
  nlohmann::json j;
  j["shape"] = fit.params.shape;
  j["scale"] = fit.params.scale;
  j["r2"] = fit.r2;
  j["n_samples"] = fit.n_samples;
  j["mean_exchanges"] = fit.mean_exchanges;
  return j.dump(2);
}

}  // namespace durmod::fitdata
