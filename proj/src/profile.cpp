#include "durmod/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace durmod::profile {

namespace {

BigInt big_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 0; i < k; ++i) {
    r *= (n - i);
    r /= (i + 1);
  }
  return r;
}

double ratio_to_double(const BigInt& num, const BigInt& den) {
  if (den == 0) return std::numeric_limits<double>::quiet_NaN();
  const long double n = num.convert_to<long double>();
  const long double d = den.convert_to<long double>();
  return double(n / d);
}

// Coefficients of base^power, base given by its coefficient vector.
std::vector<BigInt> poly_power(const std::vector<BigInt>& base, int power) {
  std::vector<BigInt> acc{1};
  for (int rep = 0; rep < power; ++rep) {
    std::vector<BigInt> next(acc.size() + base.size() - 1, BigInt(0));
    for (std::size_t a = 0; a < acc.size(); ++a) {
      if (acc[a] == 0) continue;
      for (std::size_t b = 0; b < base.size(); ++b)
        if (base[b] != 0) next[a + b] += acc[a] * base[b];
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

int FaultProfile::max_tolerable() const {
  int c = 0;
  for (int k = 0; k <= known_up_to && k < int(s.size()); ++k)
    if (s[std::size_t(k)] > 0) c = k;
  return c;
}

void fill_ratios(FaultProfile& fp) {
  const int n = fp.n_total;
  fp.q.assign(fp.s.size(), 0.0);
  fp.p.assign(fp.s.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < fp.s.size(); ++k)
    fp.q[k] = ratio_to_double(fp.s[k], big_binomial(n, int(k)));
  for (std::size_t k = 0; k + 1 < fp.s.size(); ++k) {
    if (fp.s[k] == 0) continue;
    // p_k = s_{k+1}(k+1) / (s_k (n-k)), exact before conversion
    fp.p[k] = ratio_to_double(fp.s[k + 1] * BigInt(int(k) + 1), fp.s[k] * BigInt(n - int(k)));
  }
}

FaultProfile profile_mds_arrays(int pi, int n, int c) {
  if (pi < 1 || n < 1 || c < 0 || c >= n)
    throw std::invalid_argument("profile_mds_arrays: need pi >= 1, 0 <= c < n");
  std::vector<BigInt> base(std::size_t(c) + 1);
  for (int i = 0; i <= c; ++i) base[std::size_t(i)] = big_binomial(n, i);
  const auto coeffs = poly_power(base, pi);
  FaultProfile fp;
  fp.n_total = pi * n;
  fp.known_up_to = fp.n_total;
  fp.s.assign(std::size_t(fp.n_total) + 1, BigInt(0));
  for (std::size_t k = 0; k < fp.s.size() && k < coeffs.size(); ++k) fp.s[k] = coeffs[k];
  fill_ratios(fp);
  return fp;
}

FaultProfile profile_2d(int n1, int m1, int n2, int m2) {
  const int c1 = n1 - m1, c2 = n2 - m2;
  if (n1 < 1 || n2 < 1 || c1 < 0 || c2 < 0)
    throw std::invalid_argument("profile_2d: need n >= m >= 0 on both axes");
  const int limit = (c1 + 1) * (c2 + 1) + std::min(c1, c2);
  const int n = n1 * n2;
  FaultProfile fp;
  fp.n_total = n;
  fp.known_up_to = std::min(limit, n);
  fp.s.assign(std::size_t(fp.known_up_to) + 1, BigInt(0));
  for (int k = 0; k <= fp.known_up_to; ++k) {
    if (k <= c1 * c2 + c1 + c2) {
      fp.s[std::size_t(k)] = big_binomial(n, k);
    } else {
      const int block = (c1 + 1) * (c2 + 1);
      fp.s[std::size_t(k)] = big_binomial(n, k) - big_binomial(n1, c1 + 1) *
                                                      big_binomial(n2, c2 + 1) *
                                                      big_binomial(n - block, k - block);
    }
  }
  fill_ratios(fp);
  return fp;
}

FaultProfile profile_mirrored(int n1, int c1, int n2) {
  if (n1 < 1 || c1 < 0 || c1 >= n1 || n2 < 2)
    throw std::invalid_argument("profile_mirrored: need 0 <= c1 < n1 and n2 >= 2");
  // Fully failed columns are chosen explicitly; the remaining columns each
  // keep at least one live copy, generating ((1+x)^{n2} - x^{n2})^{n1-j}.
  std::vector<BigInt> base(std::size_t(n2) + 1);
  for (int i = 0; i <= n2; ++i) base[std::size_t(i)] = big_binomial(n2, i);
  base[std::size_t(n2)] -= 1;

  const int n = n1 * n2;
  FaultProfile fp;
  fp.n_total = n;
  fp.known_up_to = n;
  fp.s.assign(std::size_t(n) + 1, BigInt(0));
  std::vector<std::vector<BigInt>> powers(std::size_t(n1) + 1);
  for (int e = 0; e <= n1; ++e) powers[std::size_t(e)] = poly_power(base, e);
  for (int k = 0; k <= n; ++k) {
    BigInt tot = 0;
    for (int j = 0; j <= std::min(k / n2, c1); ++j) {
      const auto& poly = powers[std::size_t(n1 - j)];
      const int deg = k - n2 * j;
      if (deg >= 0 && deg < int(poly.size()))
        tot += big_binomial(n1, j) * poly[std::size_t(deg)];
    }
    fp.s[std::size_t(k)] = tot;
  }
  fill_ratios(fp);
  return fp;
}

GeneratorMatrix make_generator(const std::vector<std::vector<int>>& rows) {
  GeneratorMatrix g;
  g.k = int(rows.size());
  if (g.k == 0 || g.k > 64) throw std::invalid_argument("generator: need 1..64 rows");
  g.n = int(rows.front().size());
  for (const auto& r : rows)
    if (int(r.size()) != g.n) throw std::invalid_argument("generator: ragged rows");
  g.cols.assign(std::size_t(g.n), 0);
  for (int r = 0; r < g.k; ++r)
    for (int c = 0; c < g.n; ++c)
      if (rows[std::size_t(r)][std::size_t(c)]) g.cols[std::size_t(c)] |= (1ull << r);
  return g;
}

GeneratorMatrix load_generator(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open generator file: " + path);
  std::vector<std::vector<int>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<int> row;
    for (char ch : line) {
      if (ch == '0' || ch == '1')
        row.push_back(ch - '0');
      else if (ch != ' ' && ch != '\t')
        throw std::runtime_error("generator file " + path + ": bad character at line " +
                                 std::to_string(lineno));
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("generator file " + path + ": no rows");
  return make_generator(rows);
}

int gf2_rank(const GeneratorMatrix& g, const std::vector<int>& erased_cols) {
  std::vector<char> erased(std::size_t(g.n), 0);
  for (int e : erased_cols) {
    if (e < 0 || e >= g.n) throw std::invalid_argument("gf2_rank: erased column out of range");
    erased[std::size_t(e)] = 1;
  }
  // Bit-parallel elimination over the surviving column words.
  std::uint64_t basis[64] = {0};
  int rank = 0;
  for (int c = 0; c < g.n; ++c) {
    if (erased[std::size_t(c)]) continue;
    std::uint64_t v = g.cols[std::size_t(c)];
    while (v) {
      const int top = 63 - __builtin_clzll(v);
      if (basis[top] == 0) {
        basis[top] = v;
        ++rank;
        break;
      }
      v ^= basis[top];
    }
  }
  return rank;
}

GeneratorProfile profile_from_generator(const GeneratorMatrix& g, int max_weight) {
  if (gf2_rank(g, {}) != g.k)
    throw std::invalid_argument("profile_from_generator: generator is rank-deficient over GF(2)");
  const int n = g.n, k = g.k;
  if (max_weight < 0) max_weight = n;
  max_weight = std::min(max_weight, n);

  GeneratorProfile out;
  out.profile.n_total = n;
  out.profile.known_up_to = max_weight;
  out.profile.s.assign(std::size_t(max_weight) + 1, BigInt(0));
  out.mev.assign(std::size_t(n - k) + 1, 0);
  out.profile.s[0] = 1;

  const auto decodable = [&](const std::vector<int>& erased) { return gf2_rank(g, erased) == k; };

  std::vector<int> pattern;
  for (int w = 1; w <= max_weight; ++w) {
    long long irrecoverable = 0;
    pattern.assign(std::size_t(w), 0);
    for (int i = 0; i < w; ++i) pattern[std::size_t(i)] = i;
    while (true) {
      // Supersets of a known minimal erasure are irrecoverable and never
      // minimal themselves; the rank oracle still decides the count.
      if (!decodable(pattern)) {
        ++irrecoverable;
        bool contains_me = false;
        for (const auto& me : out.mel) {
          if (std::includes(pattern.begin(), pattern.end(), me.begin(), me.end())) {
            contains_me = true;
            break;
          }
        }
        if (!contains_me) {
          bool minimal = true;
          for (int drop = w - 1; drop >= 0; --drop) {
            std::vector<int> candidate;
            candidate.reserve(std::size_t(w) - 1);
            for (int i = 0; i < w; ++i)
              if (i != drop) candidate.push_back(pattern[std::size_t(i)]);
            if (!decodable(candidate)) {
              minimal = false;
              break;
            }
          }
          if (minimal) {
            out.mel.push_back(pattern);
            if (w <= n - k) ++out.mev[std::size_t(w)];
          }
        }
      }
      // next combination
      int pos = w - 1;
      while (pos >= 0 && pattern[std::size_t(pos)] == n - w + pos) --pos;
      if (pos < 0) break;
      ++pattern[std::size_t(pos)];
      for (int i = pos + 1; i < w; ++i) pattern[std::size_t(i)] = pattern[std::size_t(i - 1)] + 1;
    }
    out.profile.s[std::size_t(w)] = big_binomial(n, w) - irrecoverable;
  }
  fill_ratios(out.profile);
  return out;
}

TransitionRates transition_rates(const FaultProfile& fp, double lambda, double eta, int n, int m) {
  if (lambda <= 0.0) throw std::invalid_argument("transition_rates: lambda must be positive");
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("transition_rates: eta outside [0,1]");
  const int c = n - m;
  if (c < 1 || n != fp.n_total)
    throw std::invalid_argument("transition_rates: profile does not match (n,m)");
  if (fp.known_up_to < c)
    throw std::invalid_argument("transition_rates: profile must cover k = 0..n-m");

  const auto p_at = [&](int kk) -> double {
    if (kk >= int(fp.p.size())) return 0.0;
    const double v = fp.p[std::size_t(kk)];
    return std::isnan(v) ? 0.0 : v;
  };

  TransitionRates tr;
  for (int i = 0; i < c; ++i) {
    const double j = double(n - i);
    const double g = j * lambda *
                     ((1.0 - p_at(i)) + p_at(i) * (1.0 - p_at(i + 1)) * (j - 1.0) * eta);
    const double l = j * lambda - g;
    if (l < 0.0)
      throw std::runtime_error("transition_rates: negative forward rate at state " +
                               std::to_string(i) + " (inconsistent profile/eta)");
    tr.gammas.push_back(g);
    tr.lambdas.push_back(l);
  }
  tr.gammas.push_back(0.0);
  tr.lambdas.push_back(double(m) * lambda);
  return tr;
}

std::vector<double> homogeneous_mus(int c, double mu) {
  return std::vector<double>(std::size_t(c), mu);
}

std::vector<double> progressive_mus(int c, double mu) {
  std::vector<double> mus(std::size_t(c));
  for (int i = 0; i < c; ++i) mus[std::size_t(i)] = double(i + 1) * mu;
  return mus;
}

std::string profile_to_json(const FaultProfile& fp) {
  nlohmann::json j;
  j["n_total"] = fp.n_total;
  j["known_up_to"] = fp.known_up_to;
  std::vector<std::string> s_dec;
  for (const auto& v : fp.s) s_dec.push_back(v.str());
  j["s"] = s_dec;
  j["q"] = fp.q;
  auto& p = j["p"];
  p = nlohmann::json::array();
  for (double v : fp.p) {
    if (std::isnan(v))
      p.push_back(nullptr);
    else
      p.push_back(v);
  }
  return j.dump(2);
}

}  // namespace durmod::profile
