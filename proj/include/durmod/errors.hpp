#ifndef DURMOD_ERRORS_HPP
#define DURMOD_ERRORS_HPP

// Error-probability primitives: hard-error rates derived from UCER,
// rebuild-read error probability, the Delta_i survival factor, the
// latent-sector-error model and AFR conversion. Pure, stateless functions.

#include <optional>

namespace durmod::errors {

// P(at least one uncorrectable error over `units_read` units) for a device
// with per-unit rate ucer; log-space evaluation keeps tiny rates accurate.
double hard_error_prob(double ucer, double units_read);

// P_UCER = 1 - (1-eta)^m: probability a rebuild touching m devices hits a
// hard error. Strictly below m*eta for eta in (0,1).
double uncorrectable_read_prob(double eta, int m);

struct MediaErrorParams {
  double ucer = 0.0;         // errors per byte read
  double capacity = 0.0;     // bytes per device
  double kappa = 0.0;        // static damage fraction in [0,1)
  double epsilon = 0.0;      // derived: hard_error_prob(ucer, capacity)
  double eta = 0.0;          // combined: 1-(1-epsilon)(1-kappa)
};

MediaErrorParams make_media_params(double ucer, double capacity, double kappa);

// Probability that i available devices survive concurrent hard errors while
// k+1 reads must succeed: Delta_i = 1 - I_eta(i-k, k+1). Requires i > k.
double delta_i(int i, int k, double eta);

struct SectorParams {
  double scrub_period_hours = 1.0;  // T_S
  double load_per_hour = 0.0;       // l, requests per sector-hour
  double write_error_prob = 0.0;    // P_w
  double write_fraction = 0.0;      // r_w
  long long sectors = 1;            // S per device
};

struct SectorErrorResult {
  double p_s = 0.0;    // steady-state per-sector unrecoverable error prob
  double p_s_t = 0.0;  // time-dependent variant, 0 when t not given
  double p_lse = 0.0;  // 1-(1-P_S)^S
};

SectorErrorResult sector_error_probs(const SectorParams& p,
                                     std::optional<double> t_hours = std::nullopt);

struct AfrResult {
  double exact = 0.0;   // 1 - e^{-8760/mttf}
  double linear = 0.0;  // 8760/mttf
};

AfrResult afr(double mttf_hours);

// Inverse conversions annual-failure-rate -> per-hour rate lambda.
double lambda_from_afr_exact(double afr_value);
double lambda_from_afr_linear(double afr_value);

}  // namespace durmod::errors

#endif
