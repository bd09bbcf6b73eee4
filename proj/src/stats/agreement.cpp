#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "tmpfc/error.hpp"
#include "tmpfc/stats.hpp"

namespace tmpfc::stats {
namespace {

void require_pairs(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "paired samples differ in length (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() < 3) throw Error(ErrorCode::TooFew, "need at least 3 pairs, got " + std::to_string(a.size()));
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

LinearFit ols(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y);
  LinearFit fit;
  fit.n = x.size();
  fit.x_mean = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - fit.x_mean;
    fit.sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  const double df = static_cast<double>(fit.n - 2);
  if (fit.sxx <= 0.0) {
    fit.slope = 0.0;
    fit.intercept = my;
    fit.slope_p = 1.0;
    return fit;
  }
  fit.slope = sxy / fit.sxx;
  fit.intercept = my - fit.slope * fit.x_mean;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.predict(x[i]);
    ssr += e * e;
  }
  fit.residual_sd = std::sqrt(ssr / df);
  const double se = fit.residual_sd / std::sqrt(fit.sxx);
  if (se <= 0.0) {
    fit.slope_p = fit.slope == 0.0 ? 1.0 : 0.0;
  } else {
    fit.slope_p = student_t_sf_two_sided(fit.slope / se, df);
  }
  return fit;
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y);
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw Error(ErrorCode::ZeroVariance, "correlation undefined for a constant sample");

  CorrelationResult res;
  res.n = x.size();
  res.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double n = static_cast<double>(res.n);
  if (std::fabs(res.r) >= 1.0) {
    res.p = 0.0;
    res.ci = {res.r, res.r};
    return res;
  }
  res.p = student_t_sf_two_sided(res.r * std::sqrt((n - 2.0) / (1.0 - res.r * res.r)), n - 2.0);
  if (res.n > 3) {
    const double z = std::atanh(res.r);
    const double half = boost::math::quantile(boost::math::normal(), 0.975) / std::sqrt(n - 3.0);
    res.ci = {std::tanh(z - half), std::tanh(z + half)};
  } else {
    res.ci = {-1.0, 1.0};
  }
  return res;
}

AgreementReport bland_altman(std::span<const double> a, std::span<const double> b) {
  require_pairs(a, b);
  const std::size_t n = a.size();
  std::vector<double> diff(n), avg(n);
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = a[i] - b[i];
    avg[i] = 0.5 * (a[i] + b[i]);
  }
  AgreementReport rep;
  rep.n = n;
  rep.bias = mean(diff);
  double ss = 0.0;
  for (double d : diff) ss += (d - rep.bias) * (d - rep.bias);
  rep.sd_diff = std::sqrt(ss / static_cast<double>(n - 1));
  rep.loa_low = rep.bias - kLoaMultiplier * rep.sd_diff;
  rep.loa_high = rep.bias + kLoaMultiplier * rep.sd_diff;

  const LinearFit trend = ols(avg, diff);
  rep.prop_bias_slope = trend.slope;
  rep.prop_bias_p = trend.slope_p;

  try {
    rep.pearson = pearson(a, b);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
  }
  return rep;
}

}  // namespace tmpfc::stats
