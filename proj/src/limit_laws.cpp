#include "rwre/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rwre/errors.hpp"

namespace rwre {

MeasureSampler::MeasureSampler(std::vector<double> atoms, MeasureMode mode, double eps, double shift)
    : mode_(mode), eps_(eps), shift_(shift) {
    if (eps < 0.0) throw parameter_error("MeasureSampler: negative truncation");
    atoms_.reserve(atoms.size());
    for (double a : atoms) {
        if (!(a > 0.0) || !std::isfinite(a)) throw parameter_error("MeasureSampler: atoms must be positive");
        if (a > eps) atoms_.push_back(a);
    }
    std::sort(atoms_.begin(), atoms_.end(), std::greater<double>());
}

double MeasureSampler::draw(Rng& rng) const {
    double acc = 0.0;
    if (mode_ == MeasureMode::centered) {
        for (double a : atoms_) acc += a * (rng.exponential() - 1.0);
    } else {
        for (double a : atoms_) acc += a * rng.exponential();
    }
    return shift_ + acc;
}

EmpiricalDistribution MeasureSampler::draw_many(std::size_t m, Rng& rng) const {
    if (m == 0) throw empty_range_error("draw_many: zero draws");
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = draw(rng);
    return EmpiricalDistribution(std::move(out));
}

std::pair<double, double> MeasureSampler::draw_coupled(double floor_eps, Rng& rng) const {
    double full = 0.0, floored = 0.0;
    for (double a : atoms_) {
        const double tau = rng.exponential();
        const double term = mode_ == MeasureMode::centered ? a * (tau - 1.0) : a * tau;
        full += term;
        if (a > floor_eps) floored += term;
    }
    return {shift_ + full, shift_ + floored};
}

double MeasureSampler::conditional_mean() const {
    if (mode_ == MeasureMode::centered) return shift_;
    double s = 0.0;
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) s += *it;
    return shift_ + s;
}

double MeasureSampler::conditional_var() const {
    double s = 0.0;
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) s += *it * *it;
    return s;
}

MeasureSampler make_sampler(const FinitePointProcess& pp, MeasureMode mode, double eps, double shift) {
    if (mode == MeasureMode::truncated && !(eps > 0.0))
        throw parameter_error("make_sampler: truncated mode needs a positive floor");
    return MeasureSampler(pp.atoms, mode, eps, shift);
}

CenteringConstants centering(double kappa, double lambda, double eps) {
    if (!(lambda > 0.0)) throw parameter_error("centering: lambda must be positive");
    CenteringConstants c;
    c.kappa = kappa;
    c.lambda = lambda;
    c.eps = eps;
    if (kappa == 1.0) {
        if (!(eps > 0.0) || eps > 1.0) throw parameter_error("centering: need eps in (0,1] at kappa=1");
        c.value = lambda * std::log(1.0 / eps);
    } else if (kappa > 1.0 && kappa < 2.0) {
        if (!(eps > 0.0)) throw parameter_error("centering: need eps > 0");
        c.value = lambda / (kappa - 1.0) * std::pow(eps, 1.0 - kappa);
    } else {
        throw parameter_error("centering: defined for kappa = 1 and kappa in (1,2) only");
    }
    return c;
}

CenteringConstants centering_tilde(double lambda, double eps, double nu_bar) {
    if (!(nu_bar >= 1.0)) throw parameter_error("centering_tilde: nu_bar must be >= 1");
    if (!(eps > 0.0) || eps > nu_bar) throw parameter_error("centering_tilde: need eps in (0, nu_bar]");
    CenteringConstants c;
    c.kappa = 1.0;
    c.lambda = lambda;
    c.eps = eps;
    c.nu_bar = nu_bar;
    c.value = lambda * std::log(nu_bar / eps);
    return c;
}

MeasureSampler sigma_bar_sampler(const std::vector<double>& beta, std::size_t n, double kappa) {
    return MeasureSampler(extract_Nn(beta, n, kappa).atoms, MeasureMode::centered, 0.0, 0.0);
}

MeasureSampler sigma_sampler(const std::vector<double>& beta, std::size_t n, double kappa,
                             double center_input) {
    auto atoms = extract_Nn(beta, n, kappa).atoms;
    double shift = 0.0;
    if (kappa == 1.0) {
        if (!(center_input > 0.0)) throw parameter_error("sigma_sampler: kappa=1 needs the truncated mean");
        shift = -center_input;
    } else if (kappa > 1.0) {
        if (!(center_input > 0.0)) throw parameter_error("sigma_sampler: kappa>1 needs the mean of beta");
        shift = -std::pow(static_cast<double>(n), 1.0 - 1.0 / kappa) * center_input;
    }
    return MeasureSampler(std::move(atoms), MeasureMode::raw, 0.0, shift);
}

namespace {

template <class F>
double simpson_rec(const F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double both = left + right;
    if (depth <= 0 || std::fabs(both - whole) < 15.0 * tol) return both + (both - whole) / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double simpson(const F& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, 24);
}

// Integrates a smooth [0,1]-valued function whose derivatives may blow up at
// the interval ends: panel widths halve geometrically into both endpoints so
// boundary layers of any width are resolved.
template <class F>
double integrate_with_edge_layers(const F& f, double lo, double hi, double tol) {
    const double mid = 0.5 * (lo + hi);
    const double panel_tol = tol / 104.0;
    double total = 0.0;
    double right_edge = mid;
    for (int j = 1; j <= 50; ++j) {
        const double left_edge = lo + (mid - lo) * std::ldexp(1.0, -j);
        total += simpson(f, left_edge, right_edge, panel_tol);
        right_edge = left_edge;
    }
    total += (right_edge - lo) * f(0.5 * (lo + right_edge));
    double left_edge = mid;
    for (int j = 1; j <= 50; ++j) {
        const double re = hi - (hi - mid) * std::ldexp(1.0, -j);
        total += simpson(f, left_edge, re, panel_tol);
        left_edge = re;
    }
    total += (hi - left_edge) * f(0.5 * (left_edge + hi));
    return total;
}

// log of Zolotarev's integrand factor V(theta) for a totally right-skewed
// stable law of index alpha != 1, on the open interval (-theta0, pi/2).
double log_zolotarev_v(double theta, double alpha, double theta0) {
    const double a = alpha / (alpha - 1.0);
    const double log_cos_t = std::log(std::cos(theta));
    return std::log(std::cos(alpha * theta0)) / (alpha - 1.0) +
           a * (log_cos_t - std::log(std::sin(alpha * (theta0 + theta)))) +
           std::log(std::cos(alpha * theta0 + (alpha - 1.0) * theta)) - log_cos_t;
}

// exp(-h*V(theta)) with h carried as log_h so extreme scales cannot overflow.
double skew_integrand(double theta, double alpha, double theta0, double log_h, double lo, double hi) {
    const double pad = 1e-13 * (hi - lo);
    theta = std::min(std::max(theta, lo + pad), hi - pad);
    const double e = log_h + log_zolotarev_v(theta, alpha, theta0);
    if (e > 690.0) return 0.0;
    if (e < -690.0) return 1.0;
    return std::exp(-std::exp(e));
}

// CDF of the standardized (unit Samorodnitsky-Taqqu scale, skew 1, zero
// shift) stable law, alpha != 1.
double skew_stable_cdf_std(double y, double alpha, double tol) {
    if (alpha < 1.0) {
        if (y <= 0.0) return 0.0;
        const double theta0 = M_PI / 2.0;
        const double log_h = alpha / (alpha - 1.0) * std::log(y);
        const double lo = -M_PI / 2.0, hi = M_PI / 2.0;
        auto f = [&](double t) { return skew_integrand(t, alpha, theta0, log_h, lo, hi); };
        return integrate_with_edge_layers(f, lo, hi, tol) / M_PI;
    }
    if (y == 0.0) return 1.0 / alpha;
    const bool upper = y > 0.0;
    const double theta0 = upper ? M_PI / 2.0 - M_PI / alpha : M_PI / alpha - M_PI / 2.0;
    const double log_h = alpha / (alpha - 1.0) * std::log(std::fabs(y));
    const double lo = -theta0, hi = M_PI / 2.0;
    auto f = [&](double t) { return skew_integrand(t, alpha, theta0, log_h, lo, hi); };
    const double integral = integrate_with_edge_layers(f, lo, hi, tol) / M_PI;
    return upper ? 1.0 - integral : integral;
}

// Standardized CDF at alpha = 1 (where the Zolotarev variable is exponential
// in x rather than a power).
double skew_stable_cdf_std_one(double x, double tol) {
    const double log_h = -M_PI * x / 2.0;
    if (log_h > 690.0) return 0.0;
    const double lo = -M_PI / 2.0, hi = M_PI / 2.0;
    auto f = [&](double theta) {
        const double pad = 1e-13 * (hi - lo);
        theta = std::min(std::max(theta, lo + pad), hi - pad);
        const double half_pi_plus = M_PI / 2.0 + theta;
        const double log_v = std::log(2.0 / M_PI) + std::log(half_pi_plus) -
                             std::log(std::cos(theta)) + half_pi_plus * std::tan(theta);
        const double e = log_h + log_v;
        if (e > 690.0) return 0.0;
        if (e < -690.0) return 1.0;
        return std::exp(-std::exp(e));
    };
    return integrate_with_edge_layers(f, lo, hi, tol) / M_PI;
}

bool is_one(double kappa) { return std::fabs(kappa - 1.0) < 1e-9; }

void check_stable_params(double kappa, double b) {
    if (!(kappa > 0.0) || !(kappa < 2.0)) throw parameter_error("stable law: kappa must lie in (0,2)");
    if (!(b > 0.0)) throw parameter_error("stable law: scale must be positive");
}

}  // namespace

double stable_tail_constant(double kappa) {
    if (!(kappa > 0.0) || !(kappa < 2.0)) throw parameter_error("stable_tail_constant: kappa in (0,2)");
    if (std::fabs(kappa - 1.0) < 1e-7) return 2.0 / M_PI;
    return (1.0 - kappa) / (std::tgamma(2.0 - kappa) * std::cos(M_PI * kappa / 2.0));
}

double stable_cdf(double x, double kappa, double b) {
    check_stable_params(kappa, b);
    if (!std::isfinite(x)) return x > 0.0 ? 1.0 : 0.0;
    const double sigma = b * std::pow(stable_tail_constant(kappa), -1.0 / kappa);
    const double tol = 1e-8;
    double f;
    if (is_one(kappa)) {
        f = skew_stable_cdf_std_one((x - 2.0 / M_PI * sigma * std::log(sigma)) / sigma, tol);
    } else {
        f = skew_stable_cdf_std(x / sigma, kappa, tol);
    }
    if (f < -1e-4 || f > 1.0 + 1e-4)
        throw std::runtime_error("stable_cdf quadrature failed: F(" + std::to_string(x) +
                                 ") = " + std::to_string(f) + " at kappa=" + std::to_string(kappa));
    return std::min(1.0, std::max(0.0, f));
}

double stable_quantile(double p, double kappa, double b) {
    check_stable_params(kappa, b);
    if (!(p > 0.0) || !(p < 1.0)) throw parameter_error("stable_quantile: p in (0,1)");
    double lo = -1.0, hi = 1.0;
    for (int i = 0; i < 80 && stable_cdf(lo, kappa, b) >= p; ++i) lo *= 2.0;
    for (int i = 0; i < 80 && stable_cdf(hi, kappa, b) <= p; ++i) hi *= 2.0;
    for (int i = 0; i < 100; ++i) {
        const double m = 0.5 * (lo + hi);
        if (stable_cdf(m, kappa, b) < p) {
            lo = m;
        } else {
            hi = m;
        }
        if (hi - lo < 1e-12 * std::max(1.0, std::fabs(m))) break;
    }
    return 0.5 * (lo + hi);
}

double stable_sample(double kappa, double b, Rng& rng) {
    check_stable_params(kappa, b);
    const double sigma = b * std::pow(stable_tail_constant(kappa), -1.0 / kappa);
    const double u = M_PI * (rng.uniform() - 0.5);  // Uniform(-pi/2, pi/2)
    double w = rng.exponential();
    while (w <= 0.0) w = rng.exponential();
    if (is_one(kappa)) {
        const double half_pi_plus = M_PI / 2.0 + u;
        const double z = 2.0 / M_PI *
                         (half_pi_plus * std::tan(u) -
                          std::log((M_PI / 2.0) * w * std::cos(u) / half_pi_plus));
        return sigma * z + 2.0 / M_PI * sigma * std::log(sigma);
    }
    // Chambers-Mallows-Stuck with skew fixed at 1.
    const double theta0 = kappa < 1.0 ? M_PI / 2.0 : M_PI / 2.0 - M_PI / kappa;
    const double scale_front = std::pow(std::cos(kappa * theta0), -1.0 / kappa);
    const double z = scale_front * std::sin(kappa * (theta0 + u)) /
                     std::pow(std::cos(u), 1.0 / kappa) *
                     std::pow(std::cos(kappa * theta0 + (kappa - 1.0) * u) / w, (1.0 - kappa) / kappa);
    return sigma * z;
}

double stable_scale_point_sums(double lambda, double kappa) {
    if (!(lambda > 0.0)) throw parameter_error("stable_scale_point_sums: lambda must be positive");
    if (!(kappa > 0.0) || !(kappa < 2.0)) throw parameter_error("stable_scale_point_sums: kappa in (0,2)");
    return std::pow(lambda / kappa, 1.0 / kappa);
}

double stable_scale_marked_sums(double lambda, double kappa) {
    if (!(lambda > 0.0)) throw parameter_error("stable_scale_marked_sums: lambda must be positive");
    if (!(kappa > 0.0) || !(kappa < 2.0)) throw parameter_error("stable_scale_marked_sums: kappa in (0,2)");
    return std::pow(lambda / kappa * std::tgamma(1.0 + kappa), 1.0 / kappa);
}

StabilityReport stability_convolution_check(double kappa, double lambda, int n_fold,
                                            std::size_t m_samples, double eps, Rng& rng,
                                            std::vector<double>* out_conv,
                                            std::vector<double>* out_single) {
    if (!(kappa > 0.0) || !(kappa < 2.0))
        throw parameter_error("stability_convolution_check: kappa in (0,2)");
    if (!(lambda > 0.0) || !(eps > 0.0) || eps >= 1.0)
        throw parameter_error("stability_convolution_check: need lambda > 0 and eps in (0,1)");
    if (n_fold < 1 || m_samples < 2) throw parameter_error("stability_convolution_check: sizes");

    StabilityReport rep;
    rep.kappa = kappa;
    rep.lambda = lambda;
    rep.eps = eps;
    rep.n_fold = n_fold;
    rep.m_samples = m_samples;

    const bool one = is_one(kappa);
    const double scale = std::pow(static_cast<double>(n_fold), 1.0 / kappa);
    const double eps_single = eps / scale;
    rep.extra_shift = one ? lambda * n_fold * std::log(static_cast<double>(n_fold)) : 0.0;

    const bool centered_regime = one || kappa > 1.0;
    const MeasureMode mode = centered_regime ? MeasureMode::truncated : MeasureMode::raw;
    const double shift_conv = centered_regime ? -centering(kappa, lambda, eps).value : 0.0;
    const double shift_single = centered_regime ? -centering(kappa, lambda, eps_single).value : 0.0;

    Rng conv_rng = rng.child(1);
    Rng single_rng = rng.child(2);

    std::vector<double> conv(m_samples), single(m_samples);
    for (std::size_t i = 0; i < m_samples; ++i) {
        double acc = 0.0;
        for (int k = 0; k < n_fold; ++k) {
            auto pp = sample_poisson_Nlk(lambda, kappa, eps, conv_rng);
            acc += make_sampler(pp, mode, mode == MeasureMode::truncated ? eps : 0.0, shift_conv)
                       .draw(conv_rng);
        }
        conv[i] = acc;
    }
    for (std::size_t i = 0; i < m_samples; ++i) {
        auto pp = sample_poisson_Nlk(lambda, kappa, eps_single, single_rng);
        const double y =
            make_sampler(pp, mode, mode == MeasureMode::truncated ? eps_single : 0.0, shift_single)
                .draw(single_rng);
        single[i] = scale * y + rep.extra_shift;
    }

    if (out_conv) *out_conv = conv;
    if (out_single) *out_single = single;
    rep.ks = ks_two_sample_test(EmpiricalDistribution(std::move(conv)),
                                EmpiricalDistribution(std::move(single)));
    return rep;
}

}  // namespace rwre
