#include "durmod/errors.hpp"

#include <cmath>
#include <stdexcept>

#include "durmod/num.hpp"

namespace durmod::errors {

double hard_error_prob(double ucer, double units_read) {
  if (ucer < 0.0 || ucer > 1.0) throw std::domain_error("hard_error_prob: ucer outside [0,1]");
  if (units_read < 0.0) throw std::domain_error("hard_error_prob: negative read size");
  return num::one_minus_pow(ucer, units_read);
}

double uncorrectable_read_prob(double eta, int m) {
  if (eta < 0.0 || eta > 1.0) throw std::domain_error("uncorrectable_read_prob: eta outside [0,1]");
  if (m < 1) throw std::domain_error("uncorrectable_read_prob: m >= 1 required");
  return num::one_minus_pow(eta, double(m));
}

MediaErrorParams make_media_params(double ucer, double capacity, double kappa) {
  if (kappa < 0.0 || kappa >= 1.0) throw std::domain_error("make_media_params: kappa outside [0,1)");
  MediaErrorParams p;
  p.ucer = ucer;
  p.capacity = capacity;
  p.kappa = kappa;
  p.epsilon = hard_error_prob(ucer, capacity);
  p.eta = 1.0 - (1.0 - p.epsilon) * (1.0 - kappa);
  return p;
}

double delta_i(int i, int k, double eta) {
  if (i <= k || k < 0) throw std::domain_error("delta_i: requires i > k >= 0");
  if (eta < 0.0 || eta > 1.0) throw std::domain_error("delta_i: eta outside [0,1]");
  return num::reg_beta_c(double(i - k), double(k + 1), eta);
}

SectorErrorResult sector_error_probs(const SectorParams& p, std::optional<double> t_hours) {
  if (p.scrub_period_hours <= 0.0) throw std::domain_error("sector_error_probs: T_S must be positive");
  if (p.load_per_hour < 0.0) throw std::domain_error("sector_error_probs: negative load");
  if (p.write_error_prob < 0.0 || p.write_error_prob > 1.0 || p.write_fraction < 0.0 ||
      p.write_fraction > 1.0)
    throw std::domain_error("sector_error_probs: probabilities outside [0,1]");
  if (p.sectors < 1) throw std::domain_error("sector_error_probs: sectors >= 1 required");

  SectorErrorResult r;
  const double pe = p.write_error_prob * p.write_fraction;
  const double x = p.load_per_hour * p.scrub_period_hours;
  // (1 - (1-e^{-x})/x) -> 0 as x -> 0; series below x=1e-6 avoids 0/0.
  const double factor = x < 1e-6 ? x / 2.0 - x * x / 6.0 : 1.0 - (-std::expm1(-x)) / x;
  r.p_s = factor * pe;
  if (t_hours) {
    if (*t_hours < 0.0) throw std::domain_error("sector_error_probs: negative time");
    const double phase = std::fmod(*t_hours, p.scrub_period_hours);
    r.p_s_t = -std::expm1(-p.load_per_hour * phase) * pe;
  }
  r.p_lse = num::one_minus_pow(r.p_s, double(p.sectors));
  return r;
}

AfrResult afr(double mttf_hours) {
  if (!(mttf_hours > 0.0)) throw std::domain_error("afr: mttf must be positive");
  AfrResult r;
  r.exact = -std::expm1(-8760.0 / mttf_hours);
  r.linear = 8760.0 / mttf_hours;
  return r;
}

double lambda_from_afr_exact(double a) {
  if (a < 0.0 || a >= 1.0) throw std::domain_error("lambda_from_afr_exact: afr outside [0,1)");
  return -std::log1p(-a) / 8760.0;
}

double lambda_from_afr_linear(double a) {
  if (a < 0.0) throw std::domain_error("lambda_from_afr_linear: negative afr");
  return a / 8760.0;
}

}  // namespace durmod::errors
