#include "rwre/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "rwre/errors.hpp"

namespace rwre {

namespace {

constexpr double kWeightTol = 1e-12;

void check_omega_value(double w) {
    if (!(w > 0.0 && w < 1.0))
        throw parameter_error("site probability must lie strictly inside (0,1), got " + std::to_string(w));
}

double log_rho_of(double w) { return std::log1p(-w) - std::log(w); }

// Adaptive Simpson on [a,b] with absolute tolerance.
template <class F>
double simpson_rec(const F& f, double a, double fa, double b, double fb, double m, double fm,
                   double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

double real_gcd(double a, double b, double tol) {
    while (b > tol) {
        double r = std::fmod(a, b);
        if (r > b - tol) r = 0.0;  // fmod landing just under b means "divides"
        a = b;
        b = r;
    }
    return a;
}

}  // namespace

EnvDistribution EnvDistribution::two_point(double omega_a, double omega_b, double p_a) {
    if (!(p_a > 0.0 && p_a < 1.0)) throw parameter_error("two_point weight must be in (0,1)");
    return finite_support({omega_a, omega_b}, {p_a, 1.0 - p_a});
}

EnvDistribution EnvDistribution::finite_support(std::vector<double> omega, std::vector<double> weight) {
    if (omega.empty() || omega.size() != weight.size())
        throw parameter_error("finite_support needs matching, non-empty support and weights");
    double total = 0.0;
    for (double w : omega) check_omega_value(w);
    for (double p : weight) {
        if (!(p > 0.0)) throw parameter_error("weights must be positive");
        total += p;
    }
    if (std::abs(total - 1.0) > kWeightTol)
        throw parameter_error("weights must sum to 1 (got " + std::to_string(total) + ")");

    EnvDistribution d;
    d.family_ = omega.size() == 2 ? Family::two_point : Family::finite_support;
    d.omega_ = std::move(omega);
    d.weight_ = std::move(weight);
    d.cum_.resize(d.weight_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < d.weight_.size(); ++i) {
        acc += d.weight_[i];
        d.cum_[i] = acc;
    }
    d.cum_.back() = 1.0;
    if (!(d.e_log_rho() < 0.0))
        throw parameter_error("environment law must satisfy E[log rho] < 0 (transient to the right)");
    return d;
}

EnvDistribution EnvDistribution::uniform_interval(double lo, double hi) {
    if (!(0.0 < lo && lo < hi && hi < 1.0))
        throw parameter_error("uniform_interval needs 0 < lo < hi < 1");
    EnvDistribution d;
    d.family_ = Family::uniform_interval;
    d.lo_ = lo;
    d.hi_ = hi;
    if (!(d.e_log_rho() < 0.0))
        throw parameter_error("environment law must satisfy E[log rho] < 0 (transient to the right)");
    return d;
}

double EnvDistribution::omega_from_u(double u) const {
    if (family_ == Family::uniform_interval) return lo_ + (hi_ - lo_) * u;
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    const std::size_t idx = std::min<std::size_t>(it - cum_.begin(), omega_.size() - 1);
    return omega_[idx];
}

double EnvDistribution::e_log_rho() const {
    if (family_ == Family::uniform_interval) {
        // integral of log(1-w) - log(w) over [lo,hi], closed form
        auto part = [](double w) { return -(1.0 - w) * std::log1p(-w) - w * std::log(w); };
        return (part(hi_) - part(lo_)) / (hi_ - lo_);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < omega_.size(); ++i) acc += weight_[i] * log_rho_of(omega_[i]);
    return acc;
}

double EnvDistribution::e_rho_pow(double s) const {
    if (family_ == Family::uniform_interval) {
        auto f = [s](double w) { return std::exp(s * log_rho_of(w)); };
        return integrate(f, lo_, hi_, 1e-13) / (hi_ - lo_);
    }
    // log-sum-exp keeps large s from overflowing
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> a(omega_.size());
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        a[i] = std::log(weight_[i]) + s * log_rho_of(omega_[i]);
        m = std::max(m, a[i]);
    }
    double acc = 0.0;
    for (double v : a) acc += std::exp(v - m);
    return std::exp(m + std::log(acc));
}

bool EnvDistribution::lattice() const {
    if (family_ == Family::uniform_interval) return false;
    std::vector<double> r;
    double max_abs = 0.0;
    for (double w : omega_) {
        const double v = std::abs(log_rho_of(w));
        if (v > 1e-12) {
            r.push_back(v);
            max_abs = std::max(max_abs, v);
        }
    }
    if (r.size() <= 1) return true;
    const double tol = 1e-9 * max_abs;
    double g = r[0];
    for (std::size_t i = 1; i < r.size(); ++i) g = real_gcd(std::max(g, r[i]), std::min(g, r[i]), tol);
    if (g < 1e-5 * max_abs) return false;
    for (double v : r) {
        const double q = v / g;
        if (std::abs(q - std::round(q)) > 1e-6 * std::max(1.0, q)) return false;
    }
    return true;
}

double EnvDistribution::speed() const {
    const double er = e_rho();
    if (er >= 1.0) return 0.0;  // zero-speed regime
    return (1.0 - er) / (1.0 + er);
}

std::string EnvDistribution::to_json() const {
    nlohmann::json j;
    switch (family_) {
        case Family::uniform_interval:
            j["family"] = "uniform_interval";
            j["lo"] = lo_;
            j["hi"] = hi_;
            break;
        case Family::two_point:
        case Family::finite_support:
            j["family"] = family_ == Family::two_point ? "two_point" : "finite_support";
            j["omega"] = omega_;
            j["weight"] = weight_;
            break;
    }
    return j.dump(2);
}

EnvDistribution EnvDistribution::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "uniform_interval")
        return uniform_interval(j.at("lo").get<double>(), j.at("hi").get<double>());
    if (fam == "two_point" || fam == "finite_support")
        return finite_support(j.at("omega").get<std::vector<double>>(),
                              j.at("weight").get<std::vector<double>>());
    throw parameter_error("unknown environment family: " + fam);
}

EnvDistribution reference_family(double kappa_target) {
    if (!(kappa_target > 0.0 && kappa_target < 2.5))
        throw parameter_error("reference_family expects a tail exponent in (0, 2.5)");
    const std::vector<double> omega = {0.30, 0.55, 0.80};
    const double a1 = std::exp(kappa_target * log_rho_of(omega[0]));
    const double a2 = std::exp(kappa_target * log_rho_of(omega[1]));
    const double a3 = std::exp(kappa_target * log_rho_of(omega[2]));
    // pick the middle weight, then solve the two linear constraints
    // p1+p2+p3 = 1 and p1*a1 + p2*a2 + p3*a3 = 1 for p1 and p3
    for (double p2 : {0.30, 0.25, 0.35, 0.20, 0.40, 0.15, 0.45, 0.10, 0.50}) {
        const double p1 = (1.0 - p2 * a2 - a3 * (1.0 - p2)) / (a1 - a3);
        const double p3 = 1.0 - p2 - p1;
        if (p1 < 0.02 || p1 > 0.96 || p3 < 0.02 || p3 > 0.96) continue;
        try {
            EnvDistribution d = EnvDistribution::finite_support(omega, {p1, p2, p3});
            return d;
        } catch (const parameter_error&) {
            continue;  // e.g. E[log rho] >= 0 for this weight choice
        }
    }
    throw parameter_error("no valid three-atom weights for kappa_target " + std::to_string(kappa_target));
}

KappaSolution solve_kappa(const EnvDistribution& dist, double tol) {
    if (!(dist.e_log_rho() < 0.0))
        throw parameter_error("kappa undefined: E[log rho] >= 0");

    double max_rho;
    if (dist.family() == EnvDistribution::Family::uniform_interval) {
        max_rho = (1.0 - dist.interval_lo()) / dist.interval_lo();
    } else {
        max_rho = 0.0;
        for (double w : dist.support()) max_rho = std::max(max_rho, (1.0 - w) / w);
    }
    if (max_rho <= 1.0)
        throw no_kappa_error("rho never exceeds 1, so E[rho^s] stays below 1 for all s > 0");

    auto g = [&dist](double s) { return std::log(dist.e_rho_pow(s)); };

    // g(0) = 0, g'(0) < 0, g convex and eventually positive: bracket the root.
    double hi = 1.0;
    while (g(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > 1e7) throw no_kappa_error("no positive root of E[rho^s] = 1 below s = 1e7");
    }
    double lo = hi * 0.5;
    while (g(lo) > 0.0) {
        lo *= 0.5;
        if (lo < 1e-12) throw parameter_error("root of E[rho^s] = 1 collapses to 0");
    }
    for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, lo); ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) <= 0.0 ? lo : hi) = mid;
    }
    const double kappa = 0.5 * (lo + hi);

    KappaSolution out;
    out.kappa = kappa;
    out.residual = std::abs(dist.e_rho_pow(kappa) - 1.0);
    out.lattice = dist.lattice();
    if (dist.family() == EnvDistribution::Family::uniform_interval) {
        auto f = [kappa](double w) {
            const double lr = log_rho_of(w);
            return std::exp(kappa * lr) * lr;
        };
        out.e_rho_k_log_rho = integrate(f, dist.interval_lo(), dist.interval_hi(), 1e-12) /
                              (dist.interval_hi() - dist.interval_lo());
    } else {
        double acc = 0.0;
        for (std::size_t i = 0; i < dist.support().size(); ++i) {
            const double lr = log_rho_of(dist.support()[i]);
            acc += dist.weights()[i] * std::exp(kappa * lr) * lr;
        }
        out.e_rho_k_log_rho = acc;
    }
    return out;
}

Environment::Environment(long left, std::vector<double> omega, std::uint64_t seed, bool q_conditioned)
    : left_(left), omega_(std::move(omega)), seed_(seed), q_conditioned_(q_conditioned) {
    if (omega_.empty()) throw parameter_error("environment window is empty");
    log_rho_.resize(omega_.size());
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        check_omega_value(omega_[i]);
        log_rho_[i] = log_rho_of(omega_[i]);
    }
}

void Environment::check(long x) const {
    if (x < left_ || x > right())
        throw window_error("site " + std::to_string(x) + " outside environment window [" +
                           std::to_string(left_) + ", " + std::to_string(right()) + "]");
}

void Environment::dump_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "# rwre environment v1\n";
    out << "# seed=" << seed_ << " left=" << left_ << " right=" << right()
        << " q=" << (q_conditioned_ ? 1 : 0) << "\n";
    out << "site,omega\n";
    char buf[40];
    for (std::size_t i = 0; i < omega_.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", omega_[i]);
        out << left_ + static_cast<long>(i) << "," << buf << "\n";
    }
}

Environment Environment::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::uint64_t seed = 0;
    long left = 0, right = -1;
    int q = 0;
    std::vector<double> omega;
    bool have_meta = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (std::sscanf(line.c_str(), "# seed=%llu left=%ld right=%ld q=%d",
                            reinterpret_cast<unsigned long long*>(&seed), &left, &right, &q) == 4)
                have_meta = true;
            continue;
        }
        if (line.rfind("site,", 0) == 0) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("malformed environment row: " + line);
        omega.push_back(std::stod(line.substr(comma + 1)));
    }
    if (!have_meta || omega.empty()) throw std::runtime_error("environment file missing header or rows: " + path);
    if (right - left + 1 != static_cast<long>(omega.size()))
        throw std::runtime_error("environment row count disagrees with declared window");
    return Environment(left, std::move(omega), seed, q != 0);
}

Environment sample_env_P(const EnvDistribution& dist, long left, long right, std::uint64_t seed) {
    if (left > right) throw parameter_error("environment window [left, right] is empty");
    const std::uint64_t site_key = derive(seed, stream::env_sites);
    std::vector<double> omega(static_cast<std::size_t>(right - left + 1));
    for (long x = left; x <= right; ++x)
        omega[static_cast<std::size_t>(x - left)] = dist.omega_from_u(indexed_u01(site_key, x));
    return Environment(left, std::move(omega), seed, false);
}

Environment sample_env_Q(const EnvDistribution& dist, long left, long right, std::uint64_t seed,
                         int max_attempts, QSampleStats* stats) {
    if (left > right) throw parameter_error("environment window [left, right] is empty");
    const Environment base = sample_env_P(dist, left, right, seed);
    std::vector<double> omega(static_cast<std::size_t>(right - left + 1));
    for (long x = std::max(0L, left); x <= right; ++x) omega[static_cast<std::size_t>(x - left)] = base.omega(x);
    if (left >= 0) {
        if (stats) stats->attempts = 0;
        return Environment(left, std::move(omega), seed, true);
    }

    const std::uint64_t attempt_base = derive(seed, stream::env_left_attempt);
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const std::uint64_t key = derive(attempt_base, static_cast<std::uint64_t>(attempt));
        bool ok = true;
        double prod = 1.0;
        // fill right-to-left so the running product check can bail early
        for (long x = -1; x >= left && ok; --x) {
            const double w = dist.omega_from_u(indexed_u01(key, x));
            omega[static_cast<std::size_t>(x - left)] = w;
            prod *= (1.0 - w) / w;
            ok = prod < 1.0;
        }
        if (ok) {
            if (stats) stats->attempts = attempt + 1;
            return Environment(left, std::move(omega), seed, true);
        }
    }
    throw budget_error("left-tail conditioning acceptance too low: no success in " +
                       std::to_string(max_attempts) + " attempts");
}

double log_big_pi(const Environment& env, long i, long j) {
    if (i > j) return 0.0;
    double acc = 0.0;
    for (long x = i; x <= j; ++x) acc += env.log_rho(x);
    return acc;
}

double big_pi(const Environment& env, long i, long j) { return std::exp(log_big_pi(env, i, j)); }

double r_sum(const Environment& env, long i, long j) {
    if (i > j) throw empty_range_error("r_sum over empty range [" + std::to_string(i) + ", " + std::to_string(j) + "]");
    double acc = env.rho(j);
    for (long k = j - 1; k >= i; --k) acc = env.rho(k) * (1.0 + acc);
    return acc;
}

double w_sum(const Environment& env, long i, long j) {
    if (i > j) throw empty_range_error("w_sum over empty range [" + std::to_string(i) + ", " + std::to_string(j) + "]");
    double acc = env.rho(i);
    for (long k = i + 1; k <= j; ++k) acc = env.rho(k) * (1.0 + acc);
    return acc;
}

WInfResult w_inf(const Environment& env, long j, double tol) {
    if (!env.contains(j)) throw window_error("w_inf target site outside window");
    WInfResult out;
    double pi = 1.0;
    double mean_log = 0.0;
    for (long k = j; k >= env.left(); --k) {
        pi *= env.rho(k);
        out.value += pi;
        mean_log += env.log_rho(k);
        ++out.depth;
    }
    out.last_term = pi;
    const double r = std::exp(mean_log / static_cast<double>(out.depth));  // typical per-site decay
    out.tail_estimate = r < 1.0 ? pi * r / (1.0 - r) : std::numeric_limits<double>::infinity();
    if (!(out.last_term <= tol))
        throw insufficient_window_error(
            "w_inf truncation unresolved at site " + std::to_string(j) + ": last term " +
            std::to_string(out.last_term) + " exceeds tol " + std::to_string(tol) +
            " after depth " + std::to_string(out.depth));
    return out;
}

long suggested_left_depth(const EnvDistribution& dist, double tol) {
    const double mu = -dist.e_log_rho();
    double var;
    if (dist.family() == EnvDistribution::Family::uniform_interval) {
        const double m = dist.e_log_rho();
        auto f = [m](double w) {
            const double d = log_rho_of(w) - m;
            return d * d;
        };
        var = integrate(f, dist.interval_lo(), dist.interval_hi(), 1e-10) /
              (dist.interval_hi() - dist.interval_lo());
    } else {
        var = 0.0;
        const double m = dist.e_log_rho();
        for (std::size_t i = 0; i < dist.support().size(); ++i) {
            const double d = log_rho_of(dist.support()[i]) - m;
            var += dist.weights()[i] * d * d;
        }
    }
    const double sigma = std::sqrt(var);
    const double need = std::log(1.0 / tol) + 10.0;
    // smallest d with mu*d - 4*sigma*sqrt(d) >= need
    const double x = (4.0 * sigma + std::sqrt(16.0 * sigma * sigma + 4.0 * mu * need)) / (2.0 * mu);
    const double d = std::ceil(x * x);
    return static_cast<long>(std::clamp(d, 64.0, 1048576.0));
}

}  // namespace rwre
