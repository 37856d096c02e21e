#ifndef DURMOD_CLOSEDFORM_HPP
#define DURMOD_CLOSEDFORM_HPP

// Explicit MTTDL and reliability formulas for concurrently maintained
// (n,m)-coded systems: the c=1..3 closed forms, the omega^c approximation,
// the hard-error variant, sum-of-exponentials reliability approximations,
// and the generalized key-rate-vector MTTDL with its phi(0) recursion.

#include <vector>

#include "durmod/ctmc.hpp"

namespace durmod::closedform {

// Exact MTTDL of the concurrent-repair model for c in {1,2,3}, m data
// devices, per-device failure rate lambda and repair rate mu (per hour).
// Throws std::invalid_argument for unsupported c; route those through
// ctmc or mttdl_general instead.
double mttdl_exact(int m, int c, double lambda, double mu);

// omega^c / (lambda (n-c) C(n,c)) with omega = mu/lambda. Valid when
// omega >> 1; no internal warning, callers decide how to surface that.
double mttdl_simple(int n, int c, double lambda, double mu);

// Sum-of-exponentials approximation of R(t) for c in {0,1,2,3}, clamped
// to [0,1].
double reliability_approx(int m, int c, double lambda, double mu, double t_hours);

// c! omega^c / (n(n-1)...(n-c), (lambda + eta mu)): concurrent-repair MTTDL
// with an uncorrectable-read probability eta per device read.
double mttdl_hard_error(int n, int c, double lambda, double mu, double eta);

// Rates of the generalized chain: state i (= i failures) moves to i+1 at
// lambdas[i], straight to failure at gammas[i], and is repaired back to
// full health at mus[i-1]. lambdas has c+1 entries, gammas c+1 (the last
// entry is folded into the terminal exit), mus has c.
struct GeneralRates {
  std::vector<double> lambdas;
  std::vector<double> gammas;
  std::vector<double> mus;

  int c() const { return int(mus.size()); }
};

void validate(const GeneralRates& r);

enum class GeneralMode {
  Approx,       // drop the xi corrections entirely (slight overestimate)
  ExactLemma3,  // xi_t = gamma_{t-3} mu_{t-3} prod lambda_i; needs the
                // leading-gamma-zero hypothesis, checked mechanically
};

// MTTDL = sum_x P*_{m+c-x}(0) with P*(0) built from the key rate vectors
// and the phi recursion. The xi-free variant never underestimates the
// exact value. Throws when ExactLemma3 is requested but the gamma prefix
// condition fails.
double mttdl_general(const GeneralRates& rates, GeneralMode mode);

// True when gammas[0..c-4] are all zero (always for c <= 3), i.e. the
// ExactLemma3 recursion reproduces the matrix solution exactly.
bool lemma3_condition_holds(const GeneralRates& rates);

// Equivalent absorbing chain, for cross-checks and simulation. States are
// failure counts 0..c plus "F"; carries failure metadata for biasing.
ctmc::RateModel to_rate_model(const GeneralRates& rates);

// Concurrent-repair (n,m) model as GeneralRates: lambda_i = (n-i) lambda,
// gamma_i = 0, mu_i = (i+1) mu.
GeneralRates canonical_rates(int m, int c, double lambda, double mu);

}  // namespace durmod::closedform

#endif
