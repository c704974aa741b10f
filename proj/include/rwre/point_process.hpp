#pragma once

#include <string>
#include <vector>

#include "rwre/rng.hpp"

namespace rwre {

// A finite point configuration on (0, infinity), atoms sorted decreasing.
// Poisson samples are truncated below eps_floor; empirical extractions are
// complete and carry eps_floor = 0.
struct FinitePointProcess {
    enum class Provenance { empirical, poisson };

    std::vector<double> atoms;
    Provenance provenance = Provenance::empirical;
    double eps_floor = 0.0;
    double lambda = 0.0;  // intensity scale, poisson provenance only
    double kappa = 0.0;   // tail exponent, poisson provenance only

    void dump_csv(const std::string& path) const;
    static FinitePointProcess load_csv(const std::string& path);
};

// Atoms beta_i / n^{1/kappa} from the first n block crossing times.
FinitePointProcess extract_Nn(const std::vector<double>& betas, std::size_t n, double kappa);

// Poisson process with intensity lambda * x^{-kappa-1} dx on (eps_min, inf),
// so the mean count above u is (lambda/kappa) * u^{-kappa}. Atoms are
// (kappa * Gamma_j / lambda)^{-1/kappa} for cumulative unit exponential sums
// Gamma_j, emitted while they stay above eps_min.
FinitePointProcess sample_poisson_Nlk(double lambda, double kappa, double eps_min, Rng& rng);

// Number of atoms strictly above x. For truncated samples x below the floor
// would undercount, so that is an error.
std::size_t count_above(const FinitePointProcess& pp, double x);

double sum_atoms(const FinitePointProcess& pp);
double sum_squares(const FinitePointProcess& pp);

// Expected mass removed by the eps_floor truncation (0 for empirical
// configurations; infinite when the defining integral diverges).
double truncated_tail_mean_atoms(const FinitePointProcess& pp);
double truncated_tail_mean_squares(const FinitePointProcess& pp);

}  // namespace rwre
