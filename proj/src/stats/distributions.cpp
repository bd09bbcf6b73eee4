#include <cmath>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "tmpfc/error.hpp"
#include "tmpfc/stats.hpp"

namespace tmpfc::stats {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double student_t_sf_two_sided(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))));
}

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double level) {
  if (trials == 0) throw Error(ErrorCode::EmptyInput, "proportion with zero trials");
  if (successes > trials) throw Error(ErrorCode::InvalidParams, "successes exceed trials");
  const double alpha = 1.0 - level;
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  Interval ci;
  ci.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(x, n - x + 1.0, alpha / 2.0);
  ci.high = successes == trials ? 1.0 : boost::math::ibeta_inv(x + 1.0, n - x, 1.0 - alpha / 2.0);
  return ci;
}

double LinearFit::mean_ci_halfwidth(double x) const {
  if (n < 3 || sxx <= 0.0) return 0.0;
  const boost::math::students_t dist(static_cast<double>(n - 2));
  const double tq = boost::math::quantile(dist, 0.975);
  const double dx = x - x_mean;
  return tq * residual_sd * std::sqrt(1.0 / static_cast<double>(n) + dx * dx / sxx);
}

}  // namespace tmpfc::stats
