#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwre/rng.hpp"

namespace rwre {

// Law of a single site probability omega in (0,1). rho = (1-omega)/omega is
// the left/right odds ratio that drives everything else.
class EnvDistribution {
  public:
    enum class Family { two_point, finite_support, uniform_interval };

    static EnvDistribution two_point(double omega_a, double omega_b, double p_a);
    static EnvDistribution finite_support(std::vector<double> omega, std::vector<double> weight);
    static EnvDistribution uniform_interval(double lo, double hi);

    Family family() const { return family_; }
    const std::vector<double>& support() const { return omega_; }
    const std::vector<double>& weights() const { return weight_; }
    double interval_lo() const { return lo_; }
    double interval_hi() const { return hi_; }

    // Inverse-CDF map from one uniform; the sole entry point for sampling so
    // counter-based site draws and stream draws agree.
    double omega_from_u(double u) const;
    double sample_omega(Rng& rng) const { return omega_from_u(rng.uniform()); }

    double e_log_rho() const;           // must be < 0 for right transience
    double e_rho_pow(double s) const;   // E[rho^s]
    double e_rho() const { return e_rho_pow(1.0); }

    // true when all support values of log rho are integer multiples of a
    // common step (continuous families are never lattice).
    bool lattice() const;

    // Asymptotic speed (1 - E[rho]) / (1 + E[rho]); requires E[rho] < 1.
    double speed() const;

    std::string to_json() const;
    static EnvDistribution from_json(const std::string& text);

  private:
    EnvDistribution() = default;

    Family family_ = Family::two_point;
    std::vector<double> omega_;    // discrete support
    std::vector<double> weight_;   // matching probabilities
    std::vector<double> cum_;      // cumulative weights
    double lo_ = 0.0, hi_ = 0.0;   // uniform_interval endpoints
};

// Three-atom non-lattice law with tail exponent kappa_target; the default
// subject for the statistical experiments.
EnvDistribution reference_family(double kappa_target);

struct KappaSolution {
    double kappa = 0.0;
    double residual = 0.0;          // |E[rho^kappa] - 1|
    double e_rho_k_log_rho = 0.0;   // E[rho^kappa * log rho]
    bool lattice = false;
};

// Positive root of E[rho^s] = 1. Throws no_kappa_error when rho <= 1 a.s.
// (no root) and parameter_error when E[log rho] >= 0.
KappaSolution solve_kappa(const EnvDistribution& dist, double tol = 1e-12);

// One realized environment on an inclusive site window [left, right].
class Environment {
  public:
    Environment(long left, std::vector<double> omega, std::uint64_t seed, bool q_conditioned);

    long left() const { return left_; }
    long right() const { return left_ + static_cast<long>(omega_.size()) - 1; }
    std::uint64_t seed() const { return seed_; }
    bool q_conditioned() const { return q_conditioned_; }

    double omega(long x) const {
        check(x);
        return omega_[static_cast<std::size_t>(x - left_)];
    }
    double rho(long x) const {
        const double w = omega(x);
        return (1.0 - w) / w;
    }
    double log_rho(long x) const {
        check(x);
        return log_rho_[static_cast<std::size_t>(x - left_)];
    }
    bool contains(long x) const { return x >= left_ && x <= right(); }

    void dump_csv(const std::string& path) const;
    static Environment load_csv(const std::string& path);

  private:
    void check(long x) const;

    long left_ = 0;
    std::vector<double> omega_;
    std::vector<double> log_rho_;
    std::uint64_t seed_ = 0;
    bool q_conditioned_ = false;
};

// i.i.d. sites over [left, right]. Site values are a pure function of
// (seed, site), so enlarging the window never disturbs existing sites.
Environment sample_env_P(const EnvDistribution& dist, long left, long right, std::uint64_t seed);

struct QSampleStats {
    int attempts = 0;  // left-block rejections before acceptance
};

// Same law on sites >= 0; sites < 0 are resampled until every partial product
// of rho ending at site -1 is below one (checked down to `left`). The residual
// error from conditioning only over a finite window decays geometrically in
// the window depth.
Environment sample_env_Q(const EnvDistribution& dist, long left, long right, std::uint64_t seed,
                         int max_attempts = 1 << 20, QSampleStats* stats = nullptr);

// Product of rho over [i, j]; empty ranges (i > j) give 1. Computed in log
// space to survive long windows.
double log_big_pi(const Environment& env, long i, long j);
double big_pi(const Environment& env, long i, long j);

// R(i,j) = sum_{k=i..j} prod_{x=i..k} rho_x, by the backward recursion
// R(i,j) = rho_i * (1 + R(i+1,j)). Empty ranges are an error.
double r_sum(const Environment& env, long i, long j);

// W(i,j) = sum_{k=i..j} prod_{x=k..j} rho_x, by W(i,j) = rho_j * (1 + W(i,j-1)).
double w_sum(const Environment& env, long i, long j);

struct WInfResult {
    double value = 0.0;       // W(left, j): the truncated limit
    double last_term = 0.0;   // product over the full window, the truncation indicator
    double tail_estimate = 0.0;
    long depth = 0;           // number of summed terms
};

// W_j = lim_{i -> -inf} W(i,j), truncated at the window edge. Throws
// insufficient_window_error when the last summed term is still above tol.
WInfResult w_inf(const Environment& env, long j, double tol = 1e-9);

// Window depth at which a typical product of rho has decayed below tol, with
// sigma-sized slack for fluctuations; used to size left windows.
long suggested_left_depth(const EnvDistribution& dist, double tol = 1e-12);

}  // namespace rwre
