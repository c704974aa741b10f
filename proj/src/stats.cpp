#include "rwre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "rwre/errors.hpp"

namespace rwre {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw empty_range_error("EmpiricalDistribution: empty sample");
    for (double v : values_) {
        if (!std::isfinite(v)) throw parameter_error("EmpiricalDistribution: non-finite value");
    }
    std::sort(values_.begin(), values_.end());
}

double EmpiricalDistribution::cdf(double x) const {
    auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double EmpiricalDistribution::quantile(double q) const {
    if (q < 0.0 || q > 1.0) throw parameter_error("quantile: level outside [0,1]");
    if (q == 0.0) return values_.front();
    auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values_.size()))) - 1;
    if (idx >= values_.size()) idx = values_.size() - 1;
    return values_[idx];
}

double ks_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    const auto& x = a.values();
    const auto& y = b.values();
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    // Advance both CDFs jointly; at a tied value both must move before the
    // gap is measured, otherwise ties inflate the statistic.
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        const double gap = std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny);
        if (gap > d) d = gap;
    }
    return d;
}

double ks_distance_to_cdf(const EmpiricalDistribution& a, const std::function<double(double)>& cdf) {
    const auto& x = a.values();
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        // Skip to the last index of a tie run; the empirical CDF only jumps there.
        if (i + 1 < x.size() && x[i + 1] == x[i]) continue;
        const double f = cdf(x[i]);
        const double lo = std::fabs(f - static_cast<double>(i) / n);
        const double hi = std::fabs(static_cast<double>(i + 1) / n - f);
        d = std::max(d, std::max(lo, hi));
    }
    return d;
}

double kolmogorov_sf(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 8.0) return 0.0;
    double s = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * t * t);
        s += (j % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * s));
}

KsResult ks_two_sample_test(const EmpiricalDistribution& a, const EmpiricalDistribution& b,
                            double alpha) {
    KsResult r;
    r.n1 = a.size();
    r.n2 = b.size();
    r.statistic = ks_distance(a, b);
    const double ne = static_cast<double>(r.n1) * static_cast<double>(r.n2) /
                      static_cast<double>(r.n1 + r.n2);
    r.p_value = kolmogorov_sf(std::sqrt(ne) * r.statistic);
    r.pass = r.p_value > alpha;
    return r;
}

KsResult ks_vs_cdf_test(const EmpiricalDistribution& a, const std::function<double(double)>& cdf,
                        double alpha) {
    KsResult r;
    r.n1 = a.size();
    r.n2 = 0;
    r.statistic = ks_distance_to_cdf(a, cdf);
    r.p_value = kolmogorov_sf(std::sqrt(static_cast<double>(r.n1)) * r.statistic);
    r.pass = r.p_value > alpha;
    return r;
}

ProhorovBound prohorov_coupling_bound(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty())
        throw parameter_error("prohorov_coupling_bound: need equal-length nonempty samples");
    double sum_abs = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::fabs(x[i] - y[i]);
        sum_abs += d;
        sum_sq += d * d;
    }
    const double n = static_cast<double>(x.size());
    ProhorovBound b;
    b.cube_root_mean_square = std::cbrt(sum_sq / n);
    b.sqrt_mean_abs = std::sqrt(sum_abs / n);
    return b;
}

TransferCheck transfer_check(const std::vector<double>& x, const std::vector<double>& y, double delta) {
    if (x.size() != y.size() || x.empty())
        throw parameter_error("transfer_check: need equal-length nonempty samples");
    if (delta <= 0.0) throw parameter_error("transfer_check: delta must be positive");
    std::size_t apart = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::fabs(x[i] - y[i]) >= delta) ++apart;
    }
    TransferCheck t;
    t.delta = delta;
    t.fraction_apart = static_cast<double>(apart) / static_cast<double>(x.size());
    t.pass = t.fraction_apart <= delta;
    return t;
}

DispersionResult poisson_dispersion_test(const std::vector<long>& counts, double mean0, double alpha,
                                         double mean_rel_tol) {
    if (counts.size() < 2) throw parameter_error("poisson_dispersion_test: need at least two counts");
    if (mean0 <= 0.0) throw parameter_error("poisson_dispersion_test: mean0 must be positive");
    const double n = static_cast<double>(counts.size());
    double sum = 0.0;
    for (long c : counts) sum += static_cast<double>(c);
    const double mean = sum / n;
    double ss = 0.0;
    for (long c : counts) {
        const double d = static_cast<double>(c) - mean;
        ss += d * d;
    }
    DispersionResult r;
    r.mean = mean;
    // Under the Poisson null the index sum (x_i - xbar)^2 / xbar is
    // approximately chi-square with n-1 degrees of freedom.
    r.index = mean > 0.0 ? ss / mean : 0.0;
    const double cdf = chi_square_cdf(r.index, n - 1.0);
    r.p_value = 2.0 * std::min(cdf, 1.0 - cdf);
    r.pass_dispersion = r.p_value > alpha;
    r.pass_mean = std::fabs(mean - mean0) <= mean_rel_tol * mean0;
    return r;
}

GofResult chi_square_gof(const std::vector<long>& observed, const std::vector<double>& probs,
                         double alpha) {
    if (observed.size() != probs.size() || observed.size() < 2)
        throw parameter_error("chi_square_gof: need matching cells, at least two");
    double total = 0.0;
    for (long o : observed) total += static_cast<double>(o);
    if (total <= 0.0) throw empty_range_error("chi_square_gof: empty observation vector");

    // Pool trailing cells (ordered input assumed: tail cells are rarest)
    // until each expected count reaches 5.
    std::vector<double> obs, exp;
    double pool_o = 0.0, pool_e = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        pool_o += static_cast<double>(observed[i]);
        pool_e += probs[i] * total;
        if (pool_e >= 5.0) {
            obs.push_back(pool_o);
            exp.push_back(pool_e);
            pool_o = pool_e = 0.0;
        }
    }
    if (pool_e > 0.0 && !exp.empty()) {
        obs.back() += pool_o;
        exp.back() += pool_e;
    }
    if (obs.size() < 2) throw parameter_error("chi_square_gof: too few cells after pooling");

    double stat = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double d = obs[i] - exp[i];
        stat += d * d / exp[i];
    }
    GofResult r;
    r.statistic = stat;
    r.dof = static_cast<long>(obs.size()) - 1;
    r.p_value = 1.0 - chi_square_cdf(stat, static_cast<double>(r.dof));
    r.pass = r.p_value > alpha;
    return r;
}

namespace {

double hill_estimate(std::vector<double>& sorted_desc, long k) {
    const double threshold = sorted_desc[static_cast<std::size_t>(k)];
    double s = 0.0;
    for (long i = 0; i < k; ++i) s += std::log(sorted_desc[static_cast<std::size_t>(i)] / threshold);
    return static_cast<double>(k) / s;
}

}  // namespace

HillInterval hill_bootstrap(const std::vector<double>& sample, long k, int b_resamples, double level,
                            Rng& rng) {
    if (sample.size() < 32) throw parameter_error("hill_bootstrap: sample too small");
    if (k < 2 || static_cast<std::size_t>(k) >= sample.size())
        throw parameter_error("hill_bootstrap: k out of range");
    if (b_resamples < 10) throw parameter_error("hill_bootstrap: too few resamples");
    if (level <= 0.0 || level >= 1.0) throw parameter_error("hill_bootstrap: level outside (0,1)");
    for (double v : sample) {
        if (!(v > 0.0)) throw parameter_error("hill_bootstrap: sample must be positive");
    }

    std::vector<double> sorted(sample);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    HillInterval h;
    h.kappa_hat = hill_estimate(sorted, k);
    h.b_resamples = b_resamples;

    const std::size_t n = sample.size();
    std::vector<double> boot(static_cast<std::size_t>(b_resamples));
    std::vector<double> resample(n);
    for (int b = 0; b < b_resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
            resample[i] = sample[j < n ? j : n - 1];
        }
        std::sort(resample.begin(), resample.end(), std::greater<double>());
        boot[static_cast<std::size_t>(b)] = hill_estimate(resample, k);
    }
    std::sort(boot.begin(), boot.end());
    const double tail = (1.0 - level) / 2.0;
    const auto lo_idx = static_cast<std::size_t>(std::floor(tail * (b_resamples - 1)));
    const auto hi_idx = static_cast<std::size_t>(std::ceil((1.0 - tail) * (b_resamples - 1)));
    h.lo = boot[lo_idx];
    h.hi = boot[hi_idx];
    return h;
}

namespace {

// Lanczos approximation, g = 7, n = 9.
double log_gamma(double x) {
    static const double coeff[9] = {0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
                                    771.32342877765313,   -176.61502916214059,  12.507343278686905,
                                    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection; arguments here are always positive half-integers so the
        // sine never vanishes.
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = coeff[0];
    const double t = x + 7.5;
    for (int i = 1; i < 9; ++i) a += coeff[i] / (x + static_cast<double>(i));
    return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

// Series expansion of P(a,x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + static_cast<double>(n));
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Lentz continued fraction for Q(a,x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - log_gamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw parameter_error("regularized_gamma_p: a must be positive");
    if (x < 0.0) throw parameter_error("regularized_gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi_square_cdf(double x, double dof) {
    if (dof <= 0.0) throw parameter_error("chi_square_cdf: dof must be positive");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(dof / 2.0, x / 2.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace rwre
