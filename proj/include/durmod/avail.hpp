#ifndef DURMOD_AVAIL_HPP
#define DURMOD_AVAIL_HPP

// Single-device availability with repair timeouts: online/offline/dead
// transition rates, the expected-lifetime-with-timeout formula, root
// solving for the timeout multiplier or the mean uptime, and a binomial
// fit of unavailability-duration data.

#include <string>
#include <vector>

namespace durmod::avail {

struct AvailabilityParams {
  double lambda = 0.0;  // death rate, per hour
  double t_up = 0.0;    // mean uptime, hours
  double t_down = 0.0;  // mean downtime, hours

  double p_a() const { return t_up / (t_up + t_down); }
  double p13() const { return lambda * (t_up + t_down); }
};

void validate(const AvailabilityParams& p);

struct NodeRates {
  double lambda12 = 0.0;  // online -> offline
  double lambda13 = 0.0;  // online -> dead
  double lambda21 = 0.0;  // offline -> online
  double p13 = 0.0;       // P(online exit is death)
};

NodeRates node_rates(const AvailabilityParams& p);

// E[Y_alpha]: expected time from creation until death or a timeout-long
// offline period, with timeout = alpha * t_down.
double expected_timeout_life(double alpha, const AvailabilityParams& p);

enum class Unknown { Alpha, TUp };

// Solves E[Y_alpha] + alpha t_down = 1/lambda for the requested unknown by
// bracketed bisection (relative tolerance 1e-10). Throws when no sign
// change exists on the search bracket.
double solve_timeout_equation(const AvailabilityParams& p, double alpha, Unknown unknown);

struct DowntimeFit {
  double p = 0.0;
  int n_trials = 0;
  double c_u = 0.0;
  double mean_downtime_hours = 0.0;
  double objective = 0.0;  // mean squared CDF residual at the optimum
};

// Fits binomial(n,p) to C_u log10(duration) against the empirical CDF,
// n on the grid 5..30, (p, C_u) by nested least squares. Durations in
// seconds; needs >= 30 samples with at least two distinct values.
DowntimeFit fit_downtime_binomial(const std::vector<double>& durations_seconds);

// One duration (seconds) per line; '#' starts a comment.
std::vector<double> read_downtime_csv(const std::string& path);

}  // namespace durmod::avail

#endif
