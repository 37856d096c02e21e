#ifndef DURMOD_FITDATA_HPP
#define DURMOD_FITDATA_HPP

// Carrier exchange-count ingestion and Weibull parameter estimation by
// linearized regression, plus sampling and the distribution mean.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace durmod::fitdata {

struct WeibullParams {
  double shape = 1.0;  // g
  double scale = 1.0;  // y
};

void validate(const WeibullParams& p);

// CSV log: one positive integer exchange count per line, '#' comments.
// Parse errors carry the offending line number.
std::vector<long long> ingest_exchange_log(const std::string& path);

enum class PlottingPositions {
  MedianRanks,  // (i - 0.3) / (N + 0.4)
  Simple,       // i / (N + 1)
};

struct WeibullFit {
  WeibullParams params;
  double r2 = 0.0;
  std::size_t n_samples = 0;
  double mean_exchanges = 0.0;
};

// Sorts the samples, assigns plotting positions, and regresses
// ln(-ln(1-W)) on ln(t); shape = slope, scale = exp(-intercept/shape).
// Needs >= 10 samples with >= 2 distinct values.
WeibullFit fit_weibull(const std::vector<long long>& samples,
                       PlottingPositions positions = PlottingPositions::MedianRanks);
WeibullFit fit_weibull_real(const std::vector<double>& samples,
                            PlottingPositions positions = PlottingPositions::MedianRanks);

// y * Gamma(1 + 1/g)
double weibull_mean(const WeibullParams& p);

// Quantile transform y * (-ln(1-u))^{1/g} for u in [0,1).
double weibull_quantile(const WeibullParams& p, double u);

// Inverse-CDF draw through the quantile, rounded up to an integer >= 1.
long long sample_weibull(const WeibullParams& p, std::mt19937_64& rng);
double sample_weibull_real(const WeibullParams& p, std::mt19937_64& rng);

std::string fit_to_json(const WeibullFit& fit);

}  // namespace durmod::fitdata

#endif
