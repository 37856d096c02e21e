#include "durmod/ctmc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "durmod/num.hpp"

namespace durmod::ctmc {

namespace {

using MatrixLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorLd = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// LU in long double plus iterative refinement with quad-precision residuals.
// The transform-domain systems here can carry condition numbers ~ (mu/lambda)^c,
// which plain double LU cannot handle at the tolerances the tests pin down.
VectorLd solve_refined(const MatrixLd& A, const VectorLd& b) {
  Eigen::PartialPivLU<MatrixLd> lu(A);
  VectorLd x = lu.solve(b);
  const int n = int(A.rows());
  std::vector<__float128> aq(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) aq[std::size_t(i) * n + j] = __float128(A(i, j));
  for (int pass = 0; pass < 4; ++pass) {
    VectorLd r(n);
    for (int i = 0; i < n; ++i) {
      __float128 acc = __float128(b(i));
      for (int j = 0; j < n; ++j) acc -= aq[std::size_t(i) * n + j] * __float128(x(j));
      r(i) = (long double)acc;
    }
    const VectorLd d = lu.solve(r);
    x += d;
    if (d.cwiseAbs().maxCoeff() <= 1e-30L * std::max<long double>(1.0L, x.cwiseAbs().maxCoeff()))
      break;
  }
  return x;
}

std::vector<int> transient_indices(const RateModel& m) {
  std::vector<int> t;
  for (int i = 0; i < m.size(); ++i)
    if (!m.is_absorbing(i)) t.push_back(i);
  return t;
}

double total_outgoing(const RateModel& m, int s) {
  double tot = 0.0;
  for (const auto& [edge, rate] : m.rates)
    if (edge.first == s) tot += rate;
  return tot;
}

}  // namespace

void validate(const RateModel& m) {
  const int n = m.size();
  if (n == 0) throw std::invalid_argument("RateModel: empty state list");
  if (m.initial < 0 || m.initial >= n) throw std::invalid_argument("RateModel: bad initial state");
  if (m.absorbing.empty()) throw std::invalid_argument("RateModel: no absorbing state");
  for (int a : m.absorbing)
    if (a < 0 || a >= n) throw std::invalid_argument("RateModel: absorbing index out of range");
  for (const auto& [edge, rate] : m.rates) {
    const auto [from, to] = edge;
    if (from < 0 || from >= n || to < 0 || to >= n || from == to)
      throw std::invalid_argument("RateModel: bad transition endpoints");
    if (rate < 0.0) throw std::invalid_argument("RateModel: negative rate");
    if (rate > 0.0 && m.is_absorbing(from))
      throw std::invalid_argument("RateModel: outgoing rate from absorbing state");
  }
  // Every transient state must reach the absorbing set.
  std::vector<char> reaches(std::size_t(n), 0);
  std::queue<int> work;
  for (int a : m.absorbing) {
    reaches[std::size_t(a)] = 1;
    work.push(a);
  }
  while (!work.empty()) {
    const int s = work.front();
    work.pop();
    for (const auto& [edge, rate] : m.rates) {
      if (rate > 0.0 && edge.second == s && !reaches[std::size_t(edge.first)]) {
        reaches[std::size_t(edge.first)] = 1;
        work.push(edge.first);
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (!reaches[std::size_t(i)])
      throw std::invalid_argument("RateModel: state '" + m.states[std::size_t(i)] +
                                  "' cannot reach any absorbing state");
}

SolveResult mttdl_linear_solve(const RateModel& m) {
  validate(m);
  const auto trans = transient_indices(m);
  const int nt = int(trans.size());
  if (nt < 1) throw std::invalid_argument("mttdl_linear_solve: no transient states");
  std::vector<int> pos(std::size_t(m.size()), -1);
  for (int t = 0; t < nt; ++t) pos[std::size_t(trans[std::size_t(t)])] = t;
  if (pos[std::size_t(m.initial)] < 0)
    throw std::invalid_argument("mttdl_linear_solve: initial state is absorbing");

  // A = -Q_TT^T; A x = e_init gives x_j = expected time in transient j.
  MatrixLd A = MatrixLd::Zero(nt, nt);
  for (const auto& [edge, rate] : m.rates) {
    const auto [from, to] = edge;
    const int pf = pos[std::size_t(from)];
    if (pf < 0) continue;
    A(pf, pf) += (long double)rate;
    const int pt = pos[std::size_t(to)];
    if (pt >= 0) A(pt, pf) -= (long double)rate;
  }
  VectorLd b = VectorLd::Zero(nt);
  b(pos[std::size_t(m.initial)]) = 1.0L;
  const VectorLd x = solve_refined(A, b);

  SolveResult res;
  res.method = SolveMethod::LinearSolve;
  res.transient_states = trans;
  res.per_state_expected_time.resize(std::size_t(nt));
  long double sum = 0.0L;
  for (int t = 0; t < nt; ++t) {
    const long double v = x(t);
    if (v < -1e-9L) throw std::runtime_error("mttdl_linear_solve: negative expected time (singular system?)");
    res.per_state_expected_time[std::size_t(t)] = double(std::max(v, 0.0L));
    sum += std::max(v, 0.0L);
  }
  res.mttdl = double(sum);
  if (!std::isfinite(res.mttdl))
    throw std::runtime_error("mttdl_linear_solve: singular system, absorption unreachable");
  return res;
}

SolveResult fundamental_matrix_mttdl(const RateModel& m) {
  validate(m);
  const auto trans = transient_indices(m);
  const int nt = int(trans.size());
  std::vector<int> pos(std::size_t(m.size()), -1);
  for (int t = 0; t < nt; ++t) pos[std::size_t(trans[std::size_t(t)])] = t;
  const int init = pos[std::size_t(m.initial)];
  if (init < 0) throw std::invalid_argument("fundamental_matrix_mttdl: initial state is absorbing");

  std::vector<long double> qii(std::size_t(nt), 0.0L);
  for (int t = 0; t < nt; ++t) {
    const double tot = total_outgoing(m, trans[std::size_t(t)]);
    if (tot <= 0.0)
      throw std::runtime_error("fundamental_matrix_mttdl: transient state with no outgoing rate");
    qii[std::size_t(t)] = (long double)tot;
  }
  // I - L with L the jump-chain block; solve (I-L)^T y = e_init, then
  // mttdl = sum_j y_j / |q_jj|  (y_j = expected visits to j).
  MatrixLd IL = MatrixLd::Identity(nt, nt);
  for (const auto& [edge, rate] : m.rates) {
    const int pf = pos[std::size_t(edge.first)];
    const int pt = pos[std::size_t(edge.second)];
    if (pf >= 0 && pt >= 0) IL(pt, pf) -= (long double)rate / qii[std::size_t(pf)];
  }
  VectorLd b = VectorLd::Zero(nt);
  b(init) = 1.0L;
  const VectorLd visits = solve_refined(IL, b);

  SolveResult res;
  res.method = SolveMethod::FundamentalMatrix;
  res.transient_states = trans;
  res.per_state_expected_time.resize(std::size_t(nt));
  long double sum = 0.0L;
  for (int t = 0; t < nt; ++t) {
    const long double v = visits(t) / qii[std::size_t(t)];
    res.per_state_expected_time[std::size_t(t)] = double(std::max(v, 0.0L));
    sum += std::max(v, 0.0L);
  }
  res.mttdl = double(sum);
  if (!std::isfinite(res.mttdl))
    throw std::runtime_error("fundamental_matrix_mttdl: singular I-L, absorption unreachable");
  return res;
}

std::vector<std::vector<double>> to_probability_matrix(const RateModel& m) {
  validate(m);
  const int n = m.size();
  std::vector<std::vector<double>> P(std::size_t(n), std::vector<double>(std::size_t(n), 0.0));
  for (int i = 0; i < n; ++i) {
    if (m.is_absorbing(i)) {
      P[std::size_t(i)][std::size_t(i)] = 1.0;
      continue;
    }
    const double tot = total_outgoing(m, i);
    if (tot <= 0.0)
      throw std::runtime_error("to_probability_matrix: transient state '" +
                               m.states[std::size_t(i)] + "' has zero outgoing rate");
    for (const auto& [edge, rate] : m.rates)
      if (edge.first == i) P[std::size_t(i)][std::size_t(edge.second)] += rate / tot;
  }
  return P;
}

double reliability_at(const RateModel& m, double t) {
  validate(m);
  if (t < 0.0) throw std::domain_error("reliability_at: negative time");
  if (t == 0.0) return 1.0;
  const int n = m.size();
  // Uniformization, P = I + Q/Lambda, Lambda = max total outgoing rate.
  double lambda_max = 0.0;
  for (int i = 0; i < n; ++i)
    if (!m.is_absorbing(i)) lambda_max = std::max(lambda_max, total_outgoing(m, i));
  if (lambda_max <= 0.0) return 1.0;

  std::vector<std::vector<std::pair<int, double>>> out(std::size_t(n));
  for (const auto& [edge, rate] : m.rates)
    out[std::size_t(edge.first)].push_back({edge.second, rate / lambda_max});

  const double a = lambda_max * t;
  const int kmax = int(a + 12.0 * std::sqrt(a + 25.0) + 30.0);
  std::vector<double> v(std::size_t(n), 0.0), w(std::size_t(n), 0.0);
  v[std::size_t(m.initial)] = 1.0;

  double absorbed = 0.0;
  double cum_weight = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    // Poisson(a) weight of k, in log space to survive large a.
    const double logw = -a + k * std::log(a) - num::lgamma_fn(double(k) + 1.0);
    const double wk = std::exp(logw);
    cum_weight += wk;
    double v_abs = 0.0;
    for (int s : m.absorbing) v_abs += v[std::size_t(s)];
    absorbed += wk * v_abs;
    if (k == kmax || (cum_weight > 1.0 - 1e-13 && k > a)) break;
    // v <- v P
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      const double vi = v[std::size_t(i)];
      if (vi == 0.0) continue;
      if (m.is_absorbing(i)) {
        w[std::size_t(i)] += vi;
        continue;
      }
      double stay = 1.0;
      for (const auto& [to, p] : out[std::size_t(i)]) {
        w[std::size_t(to)] += vi * p;
        stay -= p;
      }
      if (stay > 0.0) w[std::size_t(i)] += vi * stay;
    }
    v.swap(w);
  }
  // Unaccounted Poisson tail is at most 1-cum_weight; fold it into the
  // conservative side (still alive) so R is never underestimated by cutoff.
  return std::clamp(1.0 - absorbed, 0.0, 1.0);
}

int durability_nines(double mttdl, double horizon, int max_nines) {
  return num::durability_nines(mttdl, horizon, max_nines);
}

std::string to_json(const RateModel& m) {
  nlohmann::json j;
  j["states"] = m.states;
  auto& rates = j["rates"];
  rates = nlohmann::json::array();
  for (const auto& [edge, rate] : m.rates)
    rates.push_back({edge.first, edge.second, rate});
  j["initial"] = m.initial;
  j["absorbing"] = std::vector<int>(m.absorbing.begin(), m.absorbing.end());
  if (!m.failure_level.empty()) j["failure_level"] = m.failure_level;
  if (!m.failure_edges.empty()) {
    auto& fe = j["failure_edges"];
    fe = nlohmann::json::array();
    for (const auto& e : m.failure_edges) fe.push_back({e.first, e.second});
  }
  return j.dump(2);
}

RateModel from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RateModel m;
  m.states = j.at("states").get<std::vector<std::string>>();
  for (const auto& row : j.at("rates")) {
    int from, to;
    if (row.at(0).is_string()) {
      const auto find = [&](const std::string& name) {
        const auto it = std::find(m.states.begin(), m.states.end(), name);
        if (it == m.states.end()) throw std::invalid_argument("RateModel json: unknown state " + name);
        return int(it - m.states.begin());
      };
      from = find(row.at(0).get<std::string>());
      to = find(row.at(1).get<std::string>());
    } else {
      from = row.at(0).get<int>();
      to = row.at(1).get<int>();
    }
    m.rates[{from, to}] += row.at(2).get<double>();
  }
  m.initial = j.value("initial", 0);
  for (int a : j.at("absorbing").get<std::vector<int>>()) m.absorbing.insert(a);
  if (j.contains("failure_level")) m.failure_level = j["failure_level"].get<std::vector<int>>();
  if (j.contains("failure_edges"))
    for (const auto& e : j["failure_edges"]) m.failure_edges.insert({e.at(0).get<int>(), e.at(1).get<int>()});
  validate(m);
  return m;
}

RateModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void save_model(const RateModel& m, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot write model file: " + path);
  outf << to_json(m) << "\n";
}

}  // namespace durmod::ctmc
