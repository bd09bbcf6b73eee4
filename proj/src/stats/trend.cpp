#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "tmpfc/error.hpp"
#include "tmpfc/stats.hpp"

namespace tmpfc::stats {
namespace {

void require_groups(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw Error(ErrorCode::TooFewGroups, "trend test needs at least 2 ordered groups");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].empty()) throw Error(ErrorCode::EmptyGroup, "group " + std::to_string(i) + " is empty");
  }
}

// 2*J as an integer: strict pairs count 2, ties count 1.
std::int64_t twice_jt(const std::vector<std::vector<double>>& groups) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      for (double u : groups[i]) {
        for (double v : groups[j]) {
          if (u < v) s += 2;
          else if (u == v) s += 1;
        }
      }
    }
  }
  return s;
}

std::vector<std::size_t> tie_blocks(const std::vector<std::vector<double>>& groups) {
  std::map<double, std::size_t> counts;
  for (const auto& g : groups) {
    for (double v : g) ++counts[v];
  }
  std::vector<std::size_t> out;
  out.reserve(counts.size());
  for (const auto& [v, c] : counts) out.push_back(c);
  return out;
}

double poly(double m, double a, double b) { return m * (m - 1.0) * (a * m + b); }

// Null distribution of 2J under random relabelling, by dynamic programming
// over the sorted tie blocks. State = how many values each group has taken.
class ExactJt {
 public:
  ExactJt(const std::vector<std::size_t>& sizes, const std::vector<std::size_t>& blocks) : sizes_(sizes) {
    stride_.resize(sizes.size());
    std::size_t states = 1;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      stride_[g] = states;
      states *= sizes[g] + 1;
    }
    std::size_t n = 0;
    for (auto s : sizes) n += s;
    max2j_ = static_cast<std::int64_t>(n * n);
    if (static_cast<double>(states) * static_cast<double>(max2j_ + 1) > 1e7) {
      throw Error(ErrorCode::InvalidParams, "exact trend distribution too large; use the normal approximation");
    }
    dist_.assign(states, {});
    dist_[0].assign(static_cast<std::size_t>(max2j_ + 1), 0.0L);
    dist_[0][0] = 1.0L;
    for (auto m : blocks) place_block(m);
  }

  // Probability mass over 2J at the terminal state.
  const std::vector<long double>& terminal() const { return dist_.back(); }

 private:
  std::vector<std::size_t> decode(std::size_t state) const {
    std::vector<std::size_t> c(sizes_.size());
    for (std::size_t g = 0; g < sizes_.size(); ++g) c[g] = (state / stride_[g]) % (sizes_[g] + 1);
    return c;
  }

  void place_block(std::size_t m) {
    std::vector<std::vector<long double>> next(dist_.size());
    std::vector<std::size_t> d(sizes_.size(), 0);
    for (std::size_t state = 0; state < dist_.size(); ++state) {
      if (dist_[state].empty()) continue;
      const auto c = decode(state);
      distribute(state, c, d, 0, m, next);
    }
    dist_ = std::move(next);
  }

  void distribute(std::size_t state, const std::vector<std::size_t>& c, std::vector<std::size_t>& d, std::size_t g,
                  std::size_t left, std::vector<std::vector<long double>>& next) {
    if (g + 1 == sizes_.size()) {
      if (left > sizes_[g] - c[g]) return;
      d[g] = left;
      emit(state, c, d, next);
      return;
    }
    const std::size_t cap = std::min(left, sizes_[g] - c[g]);
    for (std::size_t k = 0; k <= cap; ++k) {
      d[g] = k;
      distribute(state, c, d, g + 1, left - k, next);
    }
    d[g] = 0;
  }

  void emit(std::size_t state, const std::vector<std::size_t>& c, const std::vector<std::size_t>& d,
            std::vector<std::vector<long double>>& next) {
    std::int64_t add = 0;
    std::size_t placed_below = 0;  // values already placed in lower-index groups
    std::size_t block_below = 0;   // tied values of this block in lower-index groups
    long double ways = 1.0L;       // multinomial m! / prod d_g!
    std::size_t taken = 0;
    std::size_t target = state;
    for (std::size_t g = 0; g < sizes_.size(); ++g) {
      add += static_cast<std::int64_t>(d[g] * (2 * placed_below + block_below));
      placed_below += c[g];
      block_below += d[g];
      for (std::size_t k = 1; k <= d[g]; ++k) ways = ways * static_cast<long double>(taken + k) / static_cast<long double>(k);
      taken += d[g];
      target += d[g] * stride_[g];
    }
    auto& out = next[target];
    if (out.empty()) out.assign(static_cast<std::size_t>(max2j_ + 1), 0.0L);
    const auto& in = dist_[state];
    for (std::size_t j = 0; j + static_cast<std::size_t>(add) < in.size(); ++j) {
      if (in[j] != 0.0L) out[j + static_cast<std::size_t>(add)] += in[j] * ways;
    }
  }

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> stride_;
  std::int64_t max2j_ = 0;
  std::vector<std::vector<long double>> dist_;
};

}  // namespace

std::string_view to_string(TrendMethod m) {
  switch (m) {
    case TrendMethod::Auto: return "AUTO";
    case TrendMethod::ExactPermutation: return "EXACT_PERMUTATION";
    case TrendMethod::NormalApprox: return "NORMAL_APPROX";
  }
  return "?";
}

std::string_view to_string(Alternative a) { return a == Alternative::Increasing ? "INCREASING" : "DECREASING"; }

double jt_statistic(const std::vector<std::vector<double>>& groups) {
  require_groups(groups);
  return static_cast<double>(twice_jt(groups)) / 2.0;
}

TrendReport jonckheere_terpstra(const std::vector<std::vector<double>>& groups, Alternative alternative,
                                TrendMethod method) {
  require_groups(groups);
  TrendReport rep;
  double n = 0.0, sum_n2 = 0.0, sum_g1 = 0.0, sum_g2 = 0.0, sum_g3 = 0.0;
  std::vector<std::size_t> sizes;
  for (const auto& g : groups) {
    const auto ni = static_cast<double>(g.size());
    sizes.push_back(g.size());
    n += ni;
    sum_n2 += ni * ni;
    sum_g1 += poly(ni, 2.0, 5.0);
    sum_g2 += ni * (ni - 1.0) * (ni - 2.0);
    sum_g3 += ni * (ni - 1.0);
  }
  rep.group_sizes = sizes;
  const auto blocks = tie_blocks(groups);
  double sum_t1 = 0.0, sum_t2 = 0.0, sum_t3 = 0.0;
  bool ties = false;
  for (auto t : blocks) {
    const auto ti = static_cast<double>(t);
    ties = ties || t > 1;
    sum_t1 += poly(ti, 2.0, 5.0);
    sum_t2 += ti * (ti - 1.0) * (ti - 2.0);
    sum_t3 += ti * (ti - 1.0);
  }

  const std::int64_t j2 = twice_jt(groups);
  rep.jt_statistic = static_cast<double>(j2) / 2.0;
  rep.null_mean = (n * n - sum_n2) / 4.0;
  double var = (poly(n, 2.0, 5.0) - sum_g1 - sum_t1) / 72.0;
  if (n > 2.0) var += sum_g2 * sum_t2 / (36.0 * n * (n - 1.0) * (n - 2.0));
  if (n > 1.0) var += sum_g3 * sum_t3 / (8.0 * n * (n - 1.0));
  rep.null_variance = std::max(0.0, var);

  const bool exact = method == TrendMethod::ExactPermutation ||
                     (method == TrendMethod::Auto && static_cast<std::size_t>(n) <= kExactTrendMaxN);
  rep.method = exact ? TrendMethod::ExactPermutation : TrendMethod::NormalApprox;

  if (rep.null_variance <= 1e-12 * std::max(1.0, rep.null_mean * rep.null_mean)) {
    // every relabelling gives the same J
    rep.z = 0.0;
    rep.p_trend = 0.5;
    return rep;
  }
  const double sd = std::sqrt(rep.null_variance);
  rep.z = (rep.jt_statistic - rep.null_mean) / sd;

  if (exact) {
    const ExactJt dist(sizes, blocks);
    const auto& mass = dist.terminal();
    long double total = 0.0L, tail = 0.0L;
    for (std::size_t k = 0; k < mass.size(); ++k) {
      total += mass[k];
      const auto k2 = static_cast<std::int64_t>(k);
      if ((alternative == Alternative::Increasing && k2 >= j2) || (alternative == Alternative::Decreasing && k2 <= j2)) {
        tail += mass[k];
      }
    }
    rep.p_trend = static_cast<double>(tail / total);
  } else {
    // half a lattice step of J: 0.5 untied, 0.25 once ties create half-integers
    const double cc = ties ? 0.25 : 0.5;
    rep.p_trend = alternative == Alternative::Increasing
                      ? 1.0 - normal_cdf((rep.jt_statistic - cc - rep.null_mean) / sd)
                      : normal_cdf((rep.jt_statistic + cc - rep.null_mean) / sd);
  }
  rep.p_trend = std::clamp(rep.p_trend, 0.0, 1.0);
  return rep;
}

}  // namespace tmpfc::stats
