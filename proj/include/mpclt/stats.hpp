#pragma once

#include <vector>

namespace mpclt {

double normal_cdf(double x);

/// Two-sided Kolmogorov-Smirnov statistic of a sample against the standard
/// normal; the sample is copied and sorted internally.
double ks_statistic_normal(std::vector<double> sample);

/// Asymptotic KS p-value with the Stephens small-sample correction.
double ks_pvalue(double statistic, std::size_t n);

double sample_mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // unbiased, NaN for n < 2
double sample_covariance(const std::vector<double>& a, const std::vector<double>& b);

/// OLS slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);

}  // namespace mpclt
