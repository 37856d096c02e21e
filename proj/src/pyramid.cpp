#include "durmod/pyramid.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "durmod/closedform.hpp"
#include "durmod/num.hpp"
#include "durmod/profile.hpp"

namespace durmod::pyramid {

void validate(const CodeCharacteristics& code) {
  if (code.recoverability.empty() || code.recoverability.size() != code.read_overhead.size())
    throw std::invalid_argument("CodeCharacteristics: aligned nonempty vectors required");
  if (code.recoverability.front() != 1.0)
    throw std::invalid_argument("CodeCharacteristics: q_0 must be 1");
  if (code.read_overhead.front() != 1.0)
    throw std::invalid_argument("CodeCharacteristics: chi_0 must be 1");
  for (std::size_t i = 0; i < code.recoverability.size(); ++i) {
    const double q = code.recoverability[i];
    if (q < 0.0 || q > 1.0)
      throw std::invalid_argument("CodeCharacteristics: recoverability outside [0,1]");
    if (i > 0 && q > code.recoverability[i - 1] + 1e-12)
      throw std::invalid_argument("CodeCharacteristics: recoverability must be nonincreasing");
    if (code.read_overhead[i] < 1.0)
      throw std::invalid_argument("CodeCharacteristics: read overhead below 1");
  }
}

double avg_read_overhead_mds(int n, int k, int j) {
  if (k < 1 || n <= k) throw std::invalid_argument("avg_read_overhead_mds: need n > k >= 1");
  if (j < 0 || j > n) throw std::invalid_argument("avg_read_overhead_mds: j outside 0..n");
  double total = 0.0;
  for (int i = 0; i <= j; ++i) {
    total += double(i * k + k - i) * num::binomial(n - k, j - i) * num::binomial(k, i);
  }
  return total / (double(k) * num::binomial(n, j));
}

std::vector<double> repair_rates_from_overhead(double mu, double delta,
                                               const CodeCharacteristics& code,
                                               const std::vector<double>& mds_phi) {
  validate(code);
  if (!(mu > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("repair_rates_from_overhead: mu and delta must be positive");
  if (mds_phi.size() < code.read_overhead.size())
    throw std::invalid_argument("repair_rates_from_overhead: Phi vector too short");
  std::vector<double> mus;
  for (std::size_t j = 0; j + 1 < code.read_overhead.size(); ++j) {
    const double arg_chi = double(j + 1) * code.read_overhead[j + 1];
    const double arg_phi = double(j + 1) * mds_phi[j + 1];
    if (arg_chi <= 1.0 || arg_phi <= 1.0)
      throw std::domain_error("repair_rates_from_overhead: (j+1) overhead must exceed 1");
    mus.push_back(delta * mu * std::log(arg_phi) / std::log(arg_chi));
  }
  return mus;
}

PyramidResult pyramid_mttdl(const CodeCharacteristics& code, int n, int k, double lambda,
                            double mu, double delta, double eta) {
  validate(code);
  const int c = n - k;
  if (int(code.recoverability.size()) < c + 1)
    throw std::invalid_argument("pyramid_mttdl: table must cover 0..n-k failures");

  // Recoverability percentages are q_k; the transition-rate builder wants
  // the exact-profile interface, so feed q through a synthetic profile.
  profile::FaultProfile fp;
  fp.n_total = n;
  fp.known_up_to = c;
  fp.q.assign(std::size_t(c) + 2, 0.0);
  fp.p.assign(std::size_t(c) + 2, std::numeric_limits<double>::quiet_NaN());
  fp.s.assign(std::size_t(c) + 2, profile::BigInt(0));  // unused by the rate builder
  for (int i = 0; i <= c; ++i) fp.q[std::size_t(i)] = code.recoverability[std::size_t(i)];
  for (int i = 0; i <= c; ++i) {
    if (fp.q[std::size_t(i)] > 0.0)
      fp.p[std::size_t(i)] = fp.q[std::size_t(i) + 1] / fp.q[std::size_t(i)];
  }

  PyramidResult res;
  const auto tr = profile::transition_rates(fp, lambda, eta, n, k);
  res.lambdas = tr.lambdas;
  res.gammas = tr.gammas;
  std::vector<double> mds_phi;
  for (int j = 0; j <= c + 1; ++j) mds_phi.push_back(avg_read_overhead_mds(n, k, j));
  res.mus = repair_rates_from_overhead(mu, delta, code, mds_phi);
  res.mus.resize(std::size_t(c), res.mus.empty() ? mu : res.mus.back());

  closedform::GeneralRates rates{res.lambdas, res.gammas, res.mus};
  res.mttdl_hours = closedform::mttdl_general(rates, closedform::GeneralMode::Approx);
  res.nines = num::durability_nines(res.mttdl_hours, 8760.0);
  return res;
}

CodeCharacteristics code_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  CodeCharacteristics code;
  code.name = j.value("name", "unnamed");
  for (double v : j.at("recoverability_percent").get<std::vector<double>>())
    code.recoverability.push_back(v / 100.0);
  code.read_overhead = j.at("read_overhead").get<std::vector<double>>();
  validate(code);
  return code;
}

std::vector<CodeCharacteristics> load_code_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open code table: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto j = nlohmann::json::parse(ss.str());
  std::vector<CodeCharacteristics> out;
  for (const auto& entry : j.at("codes")) out.push_back(code_from_json(entry.dump()));
  return out;
}

}  // namespace durmod::pyramid
