#ifndef DURMOD_SIM_HPP
#define DURMOD_SIM_HPP

// Replicate Monte Carlo over absorbing chains and the cold-storage model.
// Per-replicate RNG streams are derived from the master seed by counter
// splitting, so results are bit-identical for a given seed regardless of
// worker count or scheduling.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "durmod/coldstore.hpp"
#include "durmod/ctmc.hpp"

namespace durmod::sim {

enum class Mode { Markov, ColdFull, ColdApprox };

struct BiasConfig {
  int threshold = 1;    // concurrent failures before biasing kicks in
  double factor = 1.0;  // multiplier on failure rates, >= 1
};

struct SimConfig {
  std::uint64_t replicates = 1;
  std::uint64_t seed = 1;
  std::optional<double> horizon_hours;  // absent: run to absorption
  Mode mode = Mode::Markov;
  std::optional<BiasConfig> bias;  // Markov mode only
  int threads = 0;                 // 0: DURMOD_THREADS env or hardware count
};

enum class EventKind : std::uint8_t { DataLoss, Unavailability, Censored };

struct SimOutcome {
  std::vector<double> times;            // hours, per replicate
  std::vector<EventKind> kinds;
  std::vector<double> weights;          // likelihood ratios, 1.0 when unbiased

  std::uint64_t censored() const;
  // (sum w)^2 / sum w^2 over absorbed replicates.
  double effective_sample_size() const;
};

// Event-driven simulation of a validated RateModel. Biasing needs the
// model's failure_level/failure_edges metadata.
SimOutcome run_replicates(const ctmc::RateModel& model, const SimConfig& config);

// Cold-storage simulation. ColdFull tracks per-carrier Weibull exchange
// budgets, gamma residual lifetimes and explicit repair waits; ColdApprox
// races exponentials with the theta_j / mu_iz surrogate rates evaluated at
// state-entry time.
SimOutcome run_replicates(const coldstore::ColdModel& model, const SimConfig& config);

// run_replicates with the bias settings applied; factor must exceed 1.
SimOutcome failure_biasing(const ctmc::RateModel& model, const SimConfig& config);

struct UnreliabilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// \hat U(t): weighted mean of the absorbed-by-t indicator.
UnreliabilityEstimate estimate_unreliability(const SimOutcome& outcome, double t_hours);

enum class EventFilter { DataLoss, Unavailability, Either };

struct MeanTimeEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;    // 95% normal interval
  double ci_high = 0.0;
  std::uint64_t n_events = 0;
  std::uint64_t n_censored = 0;
};

// Mean absorption time over replicates matching the filter; censored
// replicates are excluded and counted separately. Throws when fewer than
// two matching events exist.
MeanTimeEstimate estimate_mean_time(const SimOutcome& outcome, EventFilter filter);

void write_outcome_csv(const SimOutcome& outcome, const std::string& path);
std::string summary_json(const SimOutcome& outcome);

}  // namespace durmod::sim

#endif
