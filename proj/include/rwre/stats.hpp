#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "rwre/rng.hpp"

namespace rwre {

// Sorted sample with CDF/quantile lookups.
class EmpiricalDistribution {
  public:
    explicit EmpiricalDistribution(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double cdf(double x) const;       // P(X <= x)
    double quantile(double q) const;  // order statistic at level q in [0,1]

  private:
    std::vector<double> values_;
};

// Exact sup-distance between two empirical CDFs (tie-aware merge scan).
double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b);

// Sup-distance between an empirical CDF and an analytic one.
double ks_distance_to_cdf(const EmpiricalDistribution& a, const std::function<double(double)>& cdf);

// Tail of the Kolmogorov distribution, Q(t) = 2 sum (-1)^{j-1} exp(-2 j^2 t^2).
double kolmogorov_sf(double t);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0, n2 = 0;
    bool pass = false;  // p_value > alpha
};

KsResult ks_two_sample_test(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                            double alpha = 0.01);
KsResult ks_vs_cdf_test(const EmpiricalDistribution& a, const std::function<double(double)>& cdf,
                        double alpha = 0.01);

struct ProhorovBound {
    double cube_root_mean_square = 0.0;  // (E|X-Y|^2)^{1/3}
    double sqrt_mean_abs = 0.0;          // (E|X-Y|)^{1/2}
};

// Coupling-based upper bounds for the Prohorov (and hence Kolmogorov-weak)
// distance between the two marginals of paired samples.
ProhorovBound prohorov_coupling_bound(const std::vector<double>& x, const std::vector<double>& y);

struct TransferCheck {
    double fraction_apart = 0.0;  // empirical mass of {|x - y| >= delta}
    double delta = 0.0;
    bool pass = false;  // fraction_apart <= delta
};

// Empirical version of the closeness criterion that lets a limit transfer
// across coupled sequences.
TransferCheck transfer_check(const std::vector<double>& x, const std::vector<double>& y, double delta);

struct DispersionResult {
    double mean = 0.0;
    double index = 0.0;  // (n-1) * sample variance / sample mean
    double p_value = 1.0;
    bool pass_dispersion = false;  // two-sided chi-square at alpha
    bool pass_mean = false;        // |mean - mean0| within rel_tol of mean0
};

// Index-of-dispersion test of count data against a Poisson null with the
// given mean.
DispersionResult poisson_dispersion_test(const std::vector<long>& counts, double mean0,
                                         double alpha = 0.01, double mean_rel_tol = 0.15);

struct GofResult {
    double statistic = 0.0;
    double p_value = 1.0;
    long dof = 0;
    bool pass = false;
};

// Pearson chi-square against given cell probabilities; trailing cells are pooled
// until every expected count is at least 5.
GofResult chi_square_gof(const std::vector<long>& observed, const std::vector<double>& probs,
                         double alpha = 0.01);

struct HillInterval {
    double kappa_hat = 0.0;
    double lo = 0.0, hi = 0.0;  // percentile bootstrap interval
    int b_resamples = 0;
};

// Percentile bootstrap interval for the Hill tail-exponent estimate.
HillInterval hill_bootstrap(const std::vector<double>& sample, long k, int b_resamples, double level,
                            Rng& rng);

// Special functions used by the tests above.
double regularized_gamma_p(double a, double x);
double chi_square_cdf(double x, double dof);
double normal_cdf(double x);

}  // namespace rwre
