#include "durmod/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "durmod/fitdata.hpp"
#include "durmod/num.hpp"

namespace durmod::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t replicate) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(replicate + 1)));
}

double uniform01(std::mt19937_64& rng) { return std::generate_canonical<double, 53>(rng); }

double exponential(std::mt19937_64& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

int thread_count(const SimConfig& cfg, std::uint64_t replicates) {
  int t = cfg.threads;
  if (t <= 0) {
    if (const char* env = std::getenv("DURMOD_THREADS")) t = std::atoi(env);
  }
  if (t <= 0) t = int(std::thread::hardware_concurrency());
  if (t <= 0) t = 1;
  return int(std::min<std::uint64_t>(std::uint64_t(t), std::max<std::uint64_t>(replicates, 1)));
}

template <typename Fn>
void parallel_replicates(const SimConfig& cfg, SimOutcome& out, Fn&& body) {
  const std::uint64_t n = cfg.replicates;
  out.times.assign(n, 0.0);
  out.kinds.assign(n, EventKind::Censored);
  out.weights.assign(n, 1.0);
  const int workers = thread_count(cfg, n);
  if (workers == 1) {
    for (std::uint64_t r = 0; r < n; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::uint64_t> next{0};
  constexpr std::uint64_t chunk = 64;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::uint64_t start = next.fetch_add(chunk);
        if (start >= n) break;
        const std::uint64_t stop = std::min(start + chunk, n);
        for (std::uint64_t r = start; r < stop; ++r) body(r);
      }
    });
  }
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------- Markov

struct Edge {
  int to = 0;
  double rate = 0.0;
  bool failure = false;
};

struct MarkovCompiled {
  std::vector<std::vector<Edge>> out;
  std::vector<int> failure_level;
  std::vector<char> absorbing;
  int initial = 0;
};

MarkovCompiled compile(const ctmc::RateModel& m) {
  ctmc::validate(m);
  MarkovCompiled c;
  c.out.resize(std::size_t(m.size()));
  for (const auto& [edge, rate] : m.rates) {
    if (rate <= 0.0) continue;
    c.out[std::size_t(edge.first)].push_back(
        {edge.second, rate, m.failure_edges.count(edge) != 0});
  }
  c.failure_level = m.failure_level;
  c.absorbing.assign(std::size_t(m.size()), 0);
  for (int a : m.absorbing) c.absorbing[std::size_t(a)] = 1;
  c.initial = m.initial;
  return c;
}

void simulate_markov_one(const MarkovCompiled& mc, const SimConfig& cfg, std::uint64_t r,
                         SimOutcome& out) {
  auto rng = replicate_rng(cfg.seed, r);
  const bool biased = cfg.bias && cfg.bias->factor != 1.0;
  int state = mc.initial;
  double t = 0.0;
  double weight = 1.0;
  while (true) {
    if (mc.absorbing[std::size_t(state)]) {
      out.times[r] = t;
      out.kinds[r] = EventKind::DataLoss;
      out.weights[r] = weight;
      return;
    }
    const auto& edges = mc.out[std::size_t(state)];
    const bool boost = biased && !mc.failure_level.empty() &&
                       mc.failure_level[std::size_t(state)] >= cfg.bias->threshold;
    double total = 0.0, total_b = 0.0;
    for (const auto& e : edges) {
      total += e.rate;
      total_b += e.rate * (boost && e.failure ? cfg.bias->factor : 1.0);
    }
    const double dt = exponential(rng, total_b);
    if (cfg.horizon_hours && t + dt > *cfg.horizon_hours) {
      out.times[r] = *cfg.horizon_hours;
      out.kinds[r] = EventKind::Censored;
      out.weights[r] = weight;  // holding-time tail ratio not needed: both
                                // densities integrate to the same censor mass
      // For a biased run the censoring probabilities differ between the two
      // measures; account for the survival-ratio of the final holding time.
      if (boost || total != total_b)
        out.weights[r] = weight * std::exp(-(total - total_b) * (*cfg.horizon_hours - t));
      return;
    }
    double pick = uniform01(rng) * total_b;
    const Edge* chosen = &edges.back();
    for (const auto& e : edges) {
      const double rb = e.rate * (boost && e.failure ? cfg.bias->factor : 1.0);
      if (pick < rb) {
        chosen = &e;
        break;
      }
      pick -= rb;
    }
    if (total != total_b) {
      const double rb = chosen->rate * (boost && chosen->failure ? cfg.bias->factor : 1.0);
      weight *= (chosen->rate / rb) * std::exp(-(total - total_b) * dt);
    }
    t += dt;
    state = chosen->to;
  }
}

// ------------------------------------------------------------- cold modes

struct ColdPrecomp {
  std::vector<double> delta;  // delta[i] for i = k..n, delta[k] = 0
};

ColdPrecomp precompute(const coldstore::ColdModel& m) {
  ColdPrecomp p;
  p.delta.assign(std::size_t(m.n) + 1, 0.0);
  for (int i = m.k + 1; i <= m.n; ++i)
    p.delta[std::size_t(i)] = errors::delta_i(i, m.k, m.media.eta);
  return p;
}

struct ColdFullState {
  std::vector<int> node;        // 0=A, 1=F, 2=D
  std::vector<char> alive;      // carrier up
  std::vector<double> death;    // absolute carrier death time (alive only)
  std::vector<double> repair;   // absolute carrier repair time (dead only)
  std::vector<double> pending;  // absolute data-repair completion (D only)
};

double gamma_life(std::mt19937_64& rng, long long budget, double omega) {
  std::gamma_distribution<double> g(double(budget), 1.0 / omega);
  return g(rng);
}

void simulate_cold_full_one(const coldstore::ColdModel& m, const ColdPrecomp& pre,
                            const SimConfig& cfg, std::uint64_t r, SimOutcome& out) {
  auto rng = replicate_rng(cfg.seed, r);
  const int n = m.n, k = m.k;
  ColdFullState st;
  st.node.assign(std::size_t(n), 0);
  st.alive.assign(std::size_t(n), 1);
  st.death.resize(std::size_t(n));
  st.repair.assign(std::size_t(n), kInf);
  st.pending.assign(std::size_t(n), kInf);
  for (int u = 0; u < n; ++u)
    st.death[std::size_t(u)] =
        gamma_life(rng, fitdata::sample_weibull(m.exchanges_before_failure, rng), m.exchange_rate);

  double t = 0.0;
  std::vector<int> avail, detectable;
  while (true) {
    avail.clear();
    detectable.clear();
    int i = 0;
    for (int u = 0; u < n; ++u) {
      if (st.node[std::size_t(u)] == 0) {
        ++i;
        avail.push_back(u);
      } else if (st.node[std::size_t(u)] == 1 && st.alive[std::size_t(u)]) {
        detectable.push_back(u);
      }
    }
    const double rate_fail = double(i) * m.lambda;
    const double rate_det = double(detectable.size()) * m.theta;
    const double total = rate_fail + rate_det;

    // Next deterministic event: carrier death/repair or a data repair.
    double ts = kInf;
    int who = -1, what = 0;  // 1 carrier death, 2 carrier repair, 3 data repair
    for (int u = 0; u < n; ++u) {
      if (st.alive[std::size_t(u)]) {
        if (st.death[std::size_t(u)] < ts) {
          ts = st.death[std::size_t(u)];
          who = u;
          what = 1;
        }
      } else if (st.repair[std::size_t(u)] < ts) {
        ts = st.repair[std::size_t(u)];
        who = u;
        what = 2;
      }
      if (st.node[std::size_t(u)] == 2 && st.pending[std::size_t(u)] < ts) {
        ts = st.pending[std::size_t(u)];
        who = u;
        what = 3;
      }
    }

    const double dt = total > 0.0 ? exponential(rng, total) : kInf;
    if (t + dt < ts) {
      t += dt;
      if (cfg.horizon_hours && t > *cfg.horizon_hours) break;
      if (uniform01(rng) * total < rate_fail) {
        // Media failure of a uniformly chosen available node.
        const int u = avail[std::size_t(std::uint64_t(uniform01(rng) * double(avail.size())) %
                                        avail.size())];
        if (i == k) {
          bool carrier_blocked = false;
          for (int v = 0; v < n; ++v)
            if (st.node[std::size_t(v)] != 0 && !st.alive[std::size_t(v)]) carrier_blocked = true;
          out.times[r] = t;
          out.kinds[r] = carrier_blocked ? EventKind::Unavailability : EventKind::DataLoss;
          return;
        }
        if (uniform01(rng) < 1.0 - pre.delta[std::size_t(i)]) {
          out.times[r] = t;
          out.kinds[r] = EventKind::DataLoss;
          return;
        }
        st.node[std::size_t(u)] = 1;
      } else {
        // Detection completes; schedule the repair with its explicit waits.
        const int u = detectable[std::size_t(
            std::uint64_t(uniform01(rng) * double(detectable.size())) % detectable.size())];
        st.node[std::size_t(u)] = 2;
        // Sample k helper reads from the available nodes.
        std::vector<int> pool = avail;
        double helper_wait = 0.0;
        for (int pick = 0; pick < k; ++pick) {
          const std::size_t j =
              std::size_t(std::uint64_t(uniform01(rng) * double(pool.size())) % pool.size());
          const int h = pool[j];
          pool[j] = pool.back();
          pool.pop_back();
          if (!st.alive[std::size_t(h)])
            helper_wait = std::max(helper_wait, st.repair[std::size_t(h)] - t);
        }
        const double own_wait = st.alive[std::size_t(u)] ? 0.0 : st.repair[std::size_t(u)] - t;
        st.pending[std::size_t(u)] =
            t + std::max(helper_wait, own_wait) + exponential(rng, m.mu);
      }
    } else {
      t = ts;
      if (cfg.horizon_hours && t > *cfg.horizon_hours) break;
      if (what == 1) {
        st.alive[std::size_t(who)] = 0;
        st.death[std::size_t(who)] = kInf;
        st.repair[std::size_t(who)] = t + exponential(rng, m.phi);
      } else if (what == 2) {
        st.alive[std::size_t(who)] = 1;
        st.repair[std::size_t(who)] = kInf;
        st.death[std::size_t(who)] =
            t + gamma_life(rng, fitdata::sample_weibull(m.exchanges_before_failure, rng),
                           m.exchange_rate);
      } else {
        st.node[std::size_t(who)] = 0;
        st.pending[std::size_t(who)] = kInf;
      }
    }
  }
  out.times[r] = *cfg.horizon_hours;
  out.kinds[r] = EventKind::Censored;
}

void simulate_cold_approx_one(const coldstore::ColdModel& m, const ColdPrecomp& pre,
                              const SimConfig& cfg, std::uint64_t r, SimOutcome& out) {
  auto rng = replicate_rng(cfg.seed, r);
  const int n = m.n, k = m.k;
  std::vector<long long> budget(std::size_t(n));
  for (int u = 0; u < n; ++u)
    budget[std::size_t(u)] = fitdata::sample_weibull(m.exchanges_before_failure, rng);
  std::vector<int> node(std::size_t(n), 0);

  double t = 0.0;
  std::vector<int> avail, failed, detected;
  std::vector<double> beta_avail, beta_failed, beta_detected;
  while (true) {
    avail.clear();
    failed.clear();
    detected.clear();
    for (int u = 0; u < n; ++u) {
      if (node[std::size_t(u)] == 0)
        avail.push_back(u);
      else if (node[std::size_t(u)] == 1)
        failed.push_back(u);
      else
        detected.push_back(u);
    }
    const int i = int(avail.size()), j = int(failed.size()), z = int(detected.size());
    const auto beta_at = [&](int u) {
      return coldstore::carrier_survival(int(std::min<long long>(budget[std::size_t(u)],
                                                                 1000000000ll)),
                                         m.exchange_rate, t);
    };
    beta_avail.clear();
    beta_failed.clear();
    beta_detected.clear();
    for (int u : avail) beta_avail.push_back(beta_at(u));
    for (int u : failed) beta_failed.push_back(beta_at(u));
    for (int u : detected) beta_detected.push_back(beta_at(u));

    const double rate_fail = double(i) * m.lambda;
    const double rate_det =
        j > 0 ? std::max(0.0, coldstore::detection_rate(j, m.theta, m.phi, beta_failed)) : 0.0;
    const double rate_rep =
        z > 0 ? coldstore::repair_rate(i, z, m.mu, m.phi, k, beta_avail, beta_detected, j) : 0.0;
    const double total = rate_fail + rate_det + rate_rep;
    const double dt = exponential(rng, total);
    t += dt;
    if (cfg.horizon_hours && t > *cfg.horizon_hours) {
      out.times[r] = *cfg.horizon_hours;
      out.kinds[r] = EventKind::Censored;
      return;
    }
    const double pick = uniform01(rng) * total;
    if (pick < rate_fail) {
      if (i == k) {
        // Carrier state is only known in distribution here; draw it from the
        // same survival probabilities the rates use.
        bool carrier_blocked = false;
        for (double b : beta_failed)
          if (uniform01(rng) > b) carrier_blocked = true;
        for (double b : beta_detected)
          if (uniform01(rng) > b) carrier_blocked = true;
        out.times[r] = t;
        out.kinds[r] = carrier_blocked ? EventKind::Unavailability : EventKind::DataLoss;
        return;
      }
      if (uniform01(rng) < 1.0 - pre.delta[std::size_t(i)]) {
        out.times[r] = t;
        out.kinds[r] = EventKind::DataLoss;
        return;
      }
      const int u =
          avail[std::size_t(std::uint64_t(uniform01(rng) * double(avail.size())) % avail.size())];
      node[std::size_t(u)] = 1;
    } else if (pick < rate_fail + rate_det) {
      const int u = failed[std::size_t(std::uint64_t(uniform01(rng) * double(failed.size())) %
                                       failed.size())];
      node[std::size_t(u)] = 2;
    } else {
      const int u = detected[std::size_t(
          std::uint64_t(uniform01(rng) * double(detected.size())) % detected.size())];
      node[std::size_t(u)] = 0;
    }
  }
}

}  // namespace

std::uint64_t SimOutcome::censored() const {
  std::uint64_t c = 0;
  for (auto k : kinds)
    if (k == EventKind::Censored) ++c;
  return c;
}

double SimOutcome::effective_sample_size() const {
  double sw = 0.0, sw2 = 0.0;
  for (std::size_t r = 0; r < times.size(); ++r) {
    if (kinds[r] == EventKind::Censored) continue;
    sw += weights[r];
    sw2 += weights[r] * weights[r];
  }
  return sw2 > 0.0 ? sw * sw / sw2 : 0.0;
}

SimOutcome run_replicates(const ctmc::RateModel& model, const SimConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("run_replicates: replicates >= 1");
  if (cfg.mode != Mode::Markov)
    throw std::invalid_argument("run_replicates: cold modes need a ColdModel");
  if (cfg.bias) {
    if (cfg.bias->factor < 1.0) throw std::invalid_argument("run_replicates: bias factor >= 1");
    if (model.failure_level.empty() || model.failure_edges.empty())
      throw std::invalid_argument("run_replicates: biasing needs failure metadata on the model");
  }
  if (!cfg.horizon_hours) ctmc::validate(model);  // absorption must be reachable
  const auto mc = compile(model);
  SimOutcome out;
  parallel_replicates(cfg, out, [&](std::uint64_t r) { simulate_markov_one(mc, cfg, r, out); });
  return out;
}

SimOutcome run_replicates(const coldstore::ColdModel& model, const SimConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("run_replicates: replicates >= 1");
  if (cfg.mode == Mode::Markov)
    throw std::invalid_argument("run_replicates: Markov mode needs a RateModel");
  if (cfg.bias) throw std::invalid_argument("run_replicates: biasing applies to Markov mode only");
  coldstore::validate(model);
  if (!(model.exchange_rate > 0.0) || !(model.phi > 0.0))
    throw std::invalid_argument("run_replicates: cold modes need exchange_rate > 0 and phi > 0");
  fitdata::validate(model.exchanges_before_failure);
  const auto pre = precompute(model);
  SimOutcome out;
  if (cfg.mode == Mode::ColdFull) {
    parallel_replicates(cfg, out,
                        [&](std::uint64_t r) { simulate_cold_full_one(model, pre, cfg, r, out); });
  } else {
    parallel_replicates(cfg, out, [&](std::uint64_t r) {
      simulate_cold_approx_one(model, pre, cfg, r, out);
    });
  }
  return out;
}

SimOutcome failure_biasing(const ctmc::RateModel& model, const SimConfig& cfg) {
  if (!cfg.bias || cfg.bias->factor <= 1.0)
    throw std::invalid_argument("failure_biasing: bias factor must exceed 1");
  return run_replicates(model, cfg);
}

UnreliabilityEstimate estimate_unreliability(const SimOutcome& o, double t) {
  if (t < 0.0) throw std::domain_error("estimate_unreliability: negative time");
  if (o.times.empty()) throw std::invalid_argument("estimate_unreliability: empty outcome");
  const double n = double(o.times.size());
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < o.times.size(); ++r) {
    if (o.kinds[r] == EventKind::Censored && o.times[r] < t)
      throw std::invalid_argument("estimate_unreliability: horizon below evaluation time");
    const double x =
        (o.kinds[r] != EventKind::Censored && o.times[r] <= t) ? o.weights[r] : 0.0;
    sum += x;
    sum2 += x * x;
  }
  UnreliabilityEstimate e;
  e.value = sum / n;
  const double var = std::max(0.0, sum2 / n - e.value * e.value);
  e.std_error = std::sqrt(var / n);
  return e;
}

MeanTimeEstimate estimate_mean_time(const SimOutcome& o, EventFilter filter) {
  MeanTimeEstimate e;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t r = 0; r < o.times.size(); ++r) {
    if (o.kinds[r] == EventKind::Censored) {
      ++e.n_censored;
      continue;
    }
    const bool match = filter == EventFilter::Either ||
                       (filter == EventFilter::DataLoss && o.kinds[r] == EventKind::DataLoss) ||
                       (filter == EventFilter::Unavailability &&
                        o.kinds[r] == EventKind::Unavailability);
    if (!match) continue;
    const double x = o.weights[r] * o.times[r];
    sum += x;
    sum2 += x * x;
    ++e.n_events;
  }
  if (e.n_events < 2)
    throw std::runtime_error("estimate_mean_time: fewer than two matching events");
  const double n = double(e.n_events);
  e.mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * e.mean * e.mean) / (n - 1.0));
  e.std_error = std::sqrt(var / n);
  e.ci_low = e.mean - 1.96 * e.std_error;
  e.ci_high = e.mean + 1.96 * e.std_error;
  return e;
}

void write_outcome_csv(const SimOutcome& o, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write outcome csv: " + path);
  out << "replicate,time_hours,kind,weight\n";
  for (std::size_t r = 0; r < o.times.size(); ++r) {
    const char* kind = o.kinds[r] == EventKind::DataLoss         ? "data-loss"
                       : o.kinds[r] == EventKind::Unavailability ? "unavailability"
                                                                 : "censored";
    out << r << "," << o.times[r] << "," << kind << "," << o.weights[r] << "\n";
  }
}

std::string summary_json(const SimOutcome& o) {
  nlohmann::json j;
  j["n"] = o.times.size();
  j["censored"] = o.censored();
  j["effective_sample_size"] = o.effective_sample_size();
  const auto add = [&](const char* key, EventFilter f) {
    try {
      const auto e = estimate_mean_time(o, f);
      j[key] = {{"mean", e.mean},
                {"ci", {e.ci_low, e.ci_high}},
                {"std_error", e.std_error},
                {"n_events", e.n_events}};
    } catch (const std::exception&) {
      j[key] = nullptr;
    }
  };
  add("mttdl", EventFilter::DataLoss);
  add("mttdu", EventFilter::Either);
  return j.dump(2);
}

}  // namespace durmod::sim
