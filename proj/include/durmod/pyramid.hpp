#ifndef DURMOD_PYRAMID_HPP
#define DURMOD_PYRAMID_HPP

// Pyramid-code case study: the generic-MDS average read overhead Phi_j,
// the read-overhead -> repair-rate mapping, and MTTDL computed from a
// recoverability/overhead table.

#include <string>
#include <vector>

namespace durmod::pyramid {

struct CodeCharacteristics {
  std::string name;
  std::vector<double> recoverability;  // q_0..q_max as fractions of 1
  std::vector<double> read_overhead;   // chi_0..chi_max, chi_0 = 1
};

void validate(const CodeCharacteristics& code);

// Average read overhead of a generic (n,k) MDS code with j failures:
// Phi_j = sum_i (ik + k - i) C(n-k, j-i) C(k,i) / (k C(n,j)).
double avg_read_overhead_mds(int n, int k, int j);

// mu_j = delta mu ln((j+1) Phi_{j+1}) / ln((j+1) chi_{j+1}): the nominal
// rate scaled by the bandwidth constant and the overhead ratio. Throws
// when (j+1) chi_{j+1} <= 1 (log argument must exceed 1).
std::vector<double> repair_rates_from_overhead(double mu, double delta,
                                               const CodeCharacteristics& code,
                                               const std::vector<double>& mds_phi);

struct PyramidResult {
  double mttdl_hours = 0.0;
  int nines = 0;
  std::vector<double> mus;
  std::vector<double> lambdas;
  std::vector<double> gammas;
};

// recoverability -> q -> p -> generalized transition rates, repair rates
// from the overhead mapping, MTTDL through the generalized closed form,
// nines at the one-year horizon.
PyramidResult pyramid_mttdl(const CodeCharacteristics& code, int n, int k, double lambda,
                            double mu, double delta, double eta);

// JSON document {name, recoverability_percent:[...], read_overhead:[...]}.
CodeCharacteristics code_from_json(const std::string& text);
std::vector<CodeCharacteristics> load_code_table(const std::string& path);

}  // namespace durmod::pyramid

#endif
