#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rwre/point_process.hpp"
#include "rwre/rng.hpp"
#include "rwre/stats.hpp"

namespace rwre {

// How a fixed atom sequence is turned into a random sum over i.i.d. Exp(1)
// weights tau_i: centered uses x_i(tau_i-1), raw uses x_i*tau_i, truncated
// uses x_i*tau_i over atoms above the floor only.
enum class MeasureMode { centered, raw, truncated };

// One realization of a random probability measure: atoms are frozen, each
// draw resamples the exponential weights.
class MeasureSampler {
  public:
    MeasureSampler(std::vector<double> atoms, MeasureMode mode, double eps, double shift);

    double draw(Rng& rng) const;
    EmpiricalDistribution draw_many(std::size_t m, Rng& rng) const;

    // Same tau stream evaluated with and without an extra atom floor; the
    // difference isolates the sub-floor contribution for coupling bounds.
    std::pair<double, double> draw_coupled(double floor_eps, Rng& rng) const;

    double conditional_mean() const;  // expectation of a draw given the atoms
    double conditional_var() const;   // variance of a draw given the atoms

    const std::vector<double>& atoms() const { return atoms_; }
    MeasureMode mode() const { return mode_; }
    double eps() const { return eps_; }
    double shift() const { return shift_; }

  private:
    std::vector<double> atoms_;  // descending, already filtered by eps
    MeasureMode mode_;
    double eps_ = 0.0;
    double shift_ = 0.0;
};

MeasureSampler make_sampler(const FinitePointProcess& pp, MeasureMode mode, double eps = 0.0,
                            double shift = 0.0);

// Additive constants that recenter truncated sums: at tail index 1 the value
// is lambda*log(1/eps) (plus lambda*log(nu_bar) in the block-scaled variant),
// between 1 and 2 it is lambda/(kappa-1)*eps^{1-kappa}.
struct CenteringConstants {
    double kappa = 0.0;
    double lambda = 0.0;
    double eps = 0.0;
    double nu_bar = 1.0;  // 1 marks the plain variant
    double value = 0.0;
};

CenteringConstants centering(double kappa, double lambda, double eps);
CenteringConstants centering_tilde(double lambda, double eps, double nu_bar);  // kappa = 1 only

// Sampler over the first n block crossing means, atoms beta_i/n^{1/kappa},
// with centered exponential weights.
MeasureSampler sigma_bar_sampler(const std::vector<double>& beta, std::size_t n, double kappa);

// Uncentered variant: raw sums for kappa<1; for kappa=1 center_input is the
// truncated mean D'(n), for kappa in (1,2) it is the stationary mean of beta.
MeasureSampler sigma_sampler(const std::vector<double>& beta, std::size_t n, double kappa,
                             double center_input = 0.0);

// Totally right-skewed stable law with zero shift. The scale b is pinned by
// the upper tail: x^kappa * P(X > x) -> b^kappa as x -> infinity.
double stable_cdf(double x, double kappa, double b);
double stable_quantile(double p, double kappa, double b);
double stable_sample(double kappa, double b, Rng& rng);

// Tail constant of the unit-scale law in the Samorodnitsky-Taqqu
// parameterization: P(S_kappa(1,1,0) > x) ~ C_kappa * x^{-kappa}.
double stable_tail_constant(double kappa);

// Tail scale of limits of point sums: a Poisson process with intensity
// lambda*x^{-kappa-1} has compensated-sum tail scale b = (lambda/kappa)^{1/kappa};
// multiplying each point by an independent Exp(1) weight tilts this by
// Gamma(1+kappa).
double stable_scale_point_sums(double lambda, double kappa);
double stable_scale_marked_sums(double lambda, double kappa);

struct StabilityReport {
    double kappa = 0.0;
    double lambda = 0.0;
    double eps = 0.0;  // atom floor of the convolution arm
    int n_fold = 0;
    std::size_t m_samples = 0;
    double extra_shift = 0.0;  // applied to the rescaled single-realization arm
    KsResult ks;
};

// Convolution stability of the limiting random measures: the sum of draws
// from n_fold independent realizations against one rescaled realization.
// The single-realization arm uses floor eps*n_fold^{-1/kappa} so both arms
// have exactly the same law at finite eps (superposition plus scaling).
// Non-null out_conv/out_single receive the raw arm samples.
StabilityReport stability_convolution_check(double kappa, double lambda, int n_fold,
                                            std::size_t m_samples, double eps, Rng& rng,
                                            std::vector<double>* out_conv = nullptr,
                                            std::vector<double>* out_single = nullptr);

}  // namespace rwre
