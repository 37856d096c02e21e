#ifndef DURMOD_CTMC_HPP
#define DURMOD_CTMC_HPP

// Absorbing continuous-time Markov chains over named states: rate-matrix
// assembly, mean time to absorption, transient reliability and the
// uniformized transition probability matrix.
//
// All rates are per hour; every public result is in hours.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace durmod::ctmc {

// Immutable after construction; operations below are pure functions and
// safe to call concurrently on the same model.
struct RateModel {
  std::vector<std::string> states;
  std::map<std::pair<int, int>, double> rates;  // (from,to) -> rate, off-diagonal
  int initial = 0;
  std::set<int> absorbing;

  // Optional simulation metadata. failure_level[i] counts concurrent
  // failures in state i; failure_edges marks device-failure transitions.
  // Both may be empty for models that never go through the simulator's
  // biasing path.
  std::vector<int> failure_level;
  std::set<std::pair<int, int>> failure_edges;

  int size() const { return int(states.size()); }
  bool is_absorbing(int s) const { return absorbing.count(s) != 0; }
};

// Throws std::invalid_argument when an invariant is broken: negative rate,
// outgoing rate from an absorbing state, bad indices, or a transient state
// with no path into the absorbing set.
void validate(const RateModel& model);

enum class SolveMethod { LinearSolve, FundamentalMatrix };

struct SolveResult {
  double mttdl = 0.0;
  std::vector<double> per_state_expected_time;  // one entry per transient state
  std::vector<int> transient_states;            // global indices, aligned with above
  SolveMethod method = SolveMethod::LinearSolve;
};

// Mean time to absorption from the initial state, via the transform-domain
// Kolmogorov system at s=0. Dense LU with iterative refinement; accurate to
// ~1e-12 relative even for stiff repair/failure ratios.
SolveResult mttdl_linear_solve(const RateModel& model);

// Same quantity through the uniformized jump chain: M = (I-L)^{-1},
// mttdl = -sum_j m_{1j}/q_{jj}.
SolveResult fundamental_matrix_mttdl(const RateModel& model);

// Row-stochastic uniformized TPM, P = I + Qbar with qbar_ij = q_ij/|q_ii|.
// Absorbing rows are identity rows. Throws on a transient state with zero
// total outgoing rate.
std::vector<std::vector<double>> to_probability_matrix(const RateModel& model);

// P(not absorbed by t) from the initial state, uniformization series with
// adaptive truncation (tail mass below 1e-12). t >= 0.
double reliability_at(const RateModel& model, double t_hours);

// floor(log10(1/(1-R))) with R = e^{-horizon/mttdl}; saturates at max_nines.
int durability_nines(double mttdl, double horizon, int max_nines = 18);

// JSON document: {states:[...], rates:[[from,to,rate],...], initial,
// absorbing:[...]} plus the optional metadata fields when present.
std::string to_json(const RateModel& model);
RateModel from_json(const std::string& text);
RateModel load_model(const std::string& path);
void save_model(const RateModel& model, const std::string& path);

}  // namespace durmod::ctmc

#endif
