#ifndef DURMOD_COLDSTORE_HPP
#define DURMOD_COLDSTORE_HPP

// The s-node-state cold-storage model: state enumeration and indexing,
// state-count formulas and bounds, carrier survival and availability
// distributions, time-dependent detection/repair rates, and the analytic
// lower/upper bounds on mean time to failure/unavailability.
//
// Dynamics are defined for the three node states available/failed/detected
// (s = 3); enumeration and counting work for any s >= 2.

#include <cstdint>
#include <vector>

#include "durmod/ctmc.hpp"
#include "durmod/errors.hpp"
#include "durmod/fitdata.hpp"

namespace durmod::coldstore {

struct ColdState {
  int available = 0;  // nodes serving data
  int failed = 0;     // failed, not yet detected
  int detected = 0;   // detected, repair in progress

  bool operator==(const ColdState&) const = default;
};

struct ColdModel {
  int n = 0;  // code length (nodes)
  int k = 0;  // data chunks needed for reconstruction
  double lambda = 0.0;         // node (media) failure rate, per hour
  double mu = 0.0;             // data repair rate
  double theta = 0.0;          // failure detection rate
  double phi = 0.0;            // carrier repair rate
  double exchange_rate = 0.0;  // carrier exchanges per hour (omega)
  errors::MediaErrorParams media;
  fitdata::WeibullParams exchanges_before_failure;  // carrier budget draw
};

void validate(const ColdModel& m);

// Number of Markov states for s node states: C(n-k+s-1, n-k) + 1 (with F).
std::uint64_t ns_count(int n, int k, int s);

struct NsBounds {
  std::uint64_t lower = 0;  // sum_j C(n-k+1, j), tight (equal) for s = 2,3
  std::uint64_t upper = 0;  // C(s+n-k, s-1)
};

NsBounds ns_bounds(int n, int k, int s);

// All (available, failed, detected) states with k <= available <= n; for
// s = 3 ordered by the c_ind transform, the absorbing F excluded. General
// s returns the count through ns_count only.
std::vector<ColdState> enumerate_states(int n, int k);

// c_ind = C(n-i+1, 2) + z + 1 for state (i available, z detected); runs
// from 1 at full health to ns_count(n,k,3)-1 at (k, 0, n-k).
int state_index(int n, const ColdState& st);
ColdState index_to_state(int n, int k, int index);

// P(carrier with `remaining` exchanges left survives past t) at exchange
// rate omega: the upper regularized incomplete gamma Q(remaining, omega t).
double carrier_survival(int remaining, double omega, double t_hours);

enum class PoibinMethod {
  DftSystemSize,  // n+1 roots of unity (n = system size), as published
  DftCompact,     // i+1 roots, the minimal transform
  Convolution,    // direct Bernoulli convolution
};

// Distribution of the number of live carriers among i with survival
// probabilities betas: psi[o] = P(o alive). Sums to 1 within 1e-10;
// tiny negative DFT round-off is clamped.
std::vector<double> available_carriers_dist(const std::vector<double>& betas, int system_n,
                                            PoibinMethod method = PoibinMethod::DftSystemSize);

// Exact harmonic sum for x <= 1e6, five-term asymptotic beyond.
double harmonic_sum(std::uint64_t x);

// Exponential-tail rate of a sum Exp(phi) + sum Exp(theta_c):
// 1 / (1/phi + sum 1/theta_c).
double exp_tail_rate(double phi, const std::vector<double>& thetas);

// Unconditional detection rate theta_j(t; phi) for j failed nodes whose
// carriers have survival probabilities betas_failed (evaluated at t).
double detection_rate(int j, double theta, double phi, const std::vector<double>& betas_failed);

// Inner-sum convention for mu_z(t;phi): the published text sums over the
// failed count j, the surrounding derivation implies the detected count z.
enum class RepairSumConvention { DetectedCount, FailedCount };

// mu_z(t;phi): collective write rate of z detected nodes.
double write_rate(int z, double mu, double phi, const std::vector<double>& betas_detected,
                  int j_failed, RepairSumConvention conv = RepairSumConvention::DetectedCount);

// Unconditional repair rate mu_iz(t; phi, k): hypergeometric mixture over
// helper picks and dead-carrier counts, with the harmonic-sum wait.
double repair_rate(int i, int z, double mu, double phi, int k,
                   const std::vector<double>& betas_available,
                   const std::vector<double>& betas_detected, int j_failed,
                   RepairSumConvention conv = RepairSumConvention::DetectedCount);

// Absorbing chain of Table "state transitions and rates" with hard-error
// branching (no carrier failures): the reference model for the upper bound
// and the omega -> 0 limit.
ctmc::RateModel hard_error_chain(const ColdModel& m);

// LB = sum_i (1-Delta_i) prod_{j>i} Delta_j (hs(n)-hs(i-1))/lambda: mean
// survival of the no-detection, no-repair cascade.
double lower_bound(const ColdModel& m);

// Fundamental-matrix mean absorption time of hard_error_chain(m).
double upper_bound(const ColdModel& m);

}  // namespace durmod::coldstore

#endif
