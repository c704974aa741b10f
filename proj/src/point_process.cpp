#include "rwre/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "rwre/errors.hpp"

namespace rwre {

void FinitePointProcess::dump_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "# rwre point process v1\n";
    char head[160];
    std::snprintf(head, sizeof(head), "# provenance=%s eps_floor=%.17g lambda=%.17g kappa=%.17g\n",
                  provenance == Provenance::poisson ? "poisson" : "empirical", eps_floor, lambda, kappa);
    out << head << "atom\n";
    char buf[40];
    for (double a : atoms) {
        std::snprintf(buf, sizeof(buf), "%.17g", a);
        out << buf << "\n";
    }
}

FinitePointProcess FinitePointProcess::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    FinitePointProcess pp;
    std::string line;
    bool have_meta = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "atom") continue;
        if (line[0] == '#') {
            char prov[32];
            double eps, lam, kap;
            if (std::sscanf(line.c_str(), "# provenance=%31s eps_floor=%lg lambda=%lg kappa=%lg",
                            prov, &eps, &lam, &kap) == 4) {
                pp.provenance = std::string(prov) == "poisson" ? Provenance::poisson : Provenance::empirical;
                pp.eps_floor = eps;
                pp.lambda = lam;
                pp.kappa = kap;
                have_meta = true;
            }
            continue;
        }
        pp.atoms.push_back(std::stod(line));
    }
    if (!have_meta) throw std::runtime_error("point process file missing metadata: " + path);
    return pp;
}

FinitePointProcess extract_Nn(const std::vector<double>& betas, std::size_t n, double kappa) {
    if (n == 0 || betas.size() < n) throw parameter_error("extract_Nn needs n block crossing times");
    if (!(kappa > 0.0)) throw parameter_error("extract_Nn needs kappa > 0");
    FinitePointProcess pp;
    pp.provenance = FinitePointProcess::Provenance::empirical;
    pp.kappa = kappa;
    const double scale = std::pow(static_cast<double>(n), -1.0 / kappa);
    pp.atoms.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(betas[i] > 0.0)) throw parameter_error("block crossing times must be positive");
        pp.atoms[i] = betas[i] * scale;
    }
    std::sort(pp.atoms.begin(), pp.atoms.end(), std::greater<double>());
    return pp;
}

FinitePointProcess sample_poisson_Nlk(double lambda, double kappa, double eps_min, Rng& rng) {
    if (!(lambda > 0.0) || !(kappa > 0.0) || !(eps_min > 0.0))
        throw parameter_error("sample_poisson_Nlk needs positive lambda, kappa, eps_min");
    const double expected = lambda / kappa * std::pow(eps_min, -kappa);
    if (expected > 1e8)
        throw parameter_error("sample_poisson_Nlk would emit ~" + std::to_string(expected) +
                              " atoms; raise eps_min");
    FinitePointProcess pp;
    pp.provenance = FinitePointProcess::Provenance::poisson;
    pp.eps_floor = eps_min;
    pp.lambda = lambda;
    pp.kappa = kappa;
    // Intensity lambda*x^{-kappa-1} has mean count (lambda/kappa)*u^{-kappa}
    // above u, so mapping unit-rate arrivals Gamma_j through the inverse of
    // that tail yields the atoms in decreasing order.
    const double gamma_cap = expected;  // atoms >= eps_min <=> Gamma <= cap
    double gamma = 0.0;
    for (;;) {
        gamma += rng.exponential();
        if (gamma > gamma_cap) break;
        pp.atoms.push_back(std::pow(kappa * gamma / lambda, -1.0 / kappa));
    }
    return pp;  // cumulative sums are increasing, so atoms are already sorted decreasing
}

std::size_t count_above(const FinitePointProcess& pp, double x) {
    if (pp.provenance == FinitePointProcess::Provenance::poisson && x < pp.eps_floor)
        throw parameter_error("count_above below the truncation floor would undercount");
    // atoms sorted decreasing: first index with atom <= x
    const auto it = std::lower_bound(pp.atoms.begin(), pp.atoms.end(), x,
                                     [](double a, double v) { return a > v; });
    return static_cast<std::size_t>(it - pp.atoms.begin());
}

double sum_atoms(const FinitePointProcess& pp) {
    double acc = 0.0;
    for (auto it = pp.atoms.rbegin(); it != pp.atoms.rend(); ++it) acc += *it;  // small-to-large
    return acc;
}

double sum_squares(const FinitePointProcess& pp) {
    double acc = 0.0;
    for (auto it = pp.atoms.rbegin(); it != pp.atoms.rend(); ++it) acc += *it * *it;
    return acc;
}

double truncated_tail_mean_atoms(const FinitePointProcess& pp) {
    if (pp.provenance == FinitePointProcess::Provenance::empirical) return 0.0;
    if (pp.kappa >= 1.0) return std::numeric_limits<double>::infinity();
    return pp.lambda * std::pow(pp.eps_floor, 1.0 - pp.kappa) / (1.0 - pp.kappa);
}

double truncated_tail_mean_squares(const FinitePointProcess& pp) {
    if (pp.provenance == FinitePointProcess::Provenance::empirical) return 0.0;
    if (pp.kappa >= 2.0) return std::numeric_limits<double>::infinity();
    return pp.lambda * std::pow(pp.eps_floor, 2.0 - pp.kappa) / (2.0 - pp.kappa);
}

}  // namespace rwre
