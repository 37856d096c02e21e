#ifndef DURMOD_PROFILE_HPP
#define DURMOD_PROFILE_HPP

// Fault-tolerance profiles (s_k, q_k, p_k) for MDS array farms, 2D arrays,
// mirrored arrays and arbitrary XOR codes given by a binary generator
// matrix, plus the conversion from a profile and hard-error rate into
// generalized Markov transition rates.

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace durmod::profile {

using BigInt = boost::multiprecision::cpp_int;

struct FaultProfile {
  int n_total = 0;
  // s[k] = number of tolerable k-failure patterns, exact. Entries are
  // populated for k = 0..known_up_to only (profile sources with open
  // combinatorics stop early).
  std::vector<BigInt> s;
  std::vector<double> q;  // s_k / C(n,k)
  std::vector<double> p;  // q_{k+1}/q_k, NaN where q_k = 0
  int known_up_to = 0;

  // Largest k with s_k > 0, i.e. the redundancy c of the generalized chain.
  int max_tolerable() const;
};

// Derives q and p from exact ratios of the s vector.
void fill_ratios(FaultProfile& fp);

// pi independent (n, n-c) MDS arrays: s_k is the x^k coefficient of
// (sum_{i<=c} C(n,i) x^i)^pi.
FaultProfile profile_mds_arrays(int pi, int n, int c);

// Two-dimensional array, (n1,m1) MDS rows and (n2,m2) MDS columns with
// iterative row/column decoding. Closed form is known (conjectured) only
// for k <= (c1+1)(c2+1) + min(c1,c2); known_up_to reflects that.
FaultProfile profile_2d(int n1, int m1, int n2, int m2);

// (n1,m1)-coded array of n2-way mirrored columns (m2 = 1). Exact for all k.
FaultProfile profile_mirrored(int n1, int c1, int n2);

struct GeneratorMatrix {
  int k = 0;                       // rows (data symbols)
  int n = 0;                       // columns (stored symbols)
  std::vector<std::uint64_t> cols; // column c as a k-bit word

  bool bit(int row, int col) const { return (cols[std::size_t(col)] >> row) & 1u; }
};

GeneratorMatrix load_generator(const std::string& path);
GeneratorMatrix make_generator(const std::vector<std::vector<int>>& rows);

// Rank over GF(2) of the non-erased columns; the code recovers an erasure
// pattern exactly when that rank equals k.
int gf2_rank(const GeneratorMatrix& g, const std::vector<int>& erased_cols);

struct GeneratorProfile {
  FaultProfile profile;
  std::vector<std::vector<int>> mel;  // minimal erasures of weight <= n-k
  std::vector<long long> mev;         // mev[w] for w = 1..n-k (index 0 unused)
};

// Exhaustive erasure enumeration up to max_weight (default: all weights)
// against the GF(2) rank oracle; throws on a rank-deficient generator.
GeneratorProfile profile_from_generator(const GeneratorMatrix& g, int max_weight = -1);

struct TransitionRates {
  std::vector<double> lambdas;  // lambda_0..lambda_c
  std::vector<double> gammas;   // gamma_0..gamma_c (gamma_c = 0)
};

// gamma_i = (n-i) lambda ((1-p_i) + p_i (1-p_{i+1}) (n-i-1) eta) for
// i < c, terminal state exits at m*lambda. Throws when a computed forward
// rate would be negative (inconsistent profile/eta).
TransitionRates transition_rates(const FaultProfile& fp, double lambda, double eta,
                                 int n, int m);

std::vector<double> homogeneous_mus(int c, double mu);
std::vector<double> progressive_mus(int c, double mu);

std::string profile_to_json(const FaultProfile& fp);

}  // namespace durmod::profile

#endif
