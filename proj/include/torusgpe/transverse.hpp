#pragma once

// Ground and first excited states of the weighted radial operator
//   H = -(1/sigma) d/ds (sigma d/ds) + U(s)   on [-sqrt(omega), s_max),
// sigma(s) = 1 + s/sqrt(omega), inner product <u,v> = int u v sigma ds.
// The left endpoint is a coordinate origin (sigma = 0), not a boundary:
// the flux-form discretization builds the vanishing flux into row 0.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "torusgpe/potentials.hpp"

namespace torusgpe {

struct GridTooCoarse : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoConvergence : std::runtime_error {
    NoConvergence(const std::string& what, double res)
        : std::runtime_error(what), residual(res) {}
    double residual;
};

struct RadialGrid {
    double omega = 0.0;  // +inf on the flat reference grid (sigma == 1)
    double s_min = 0.0;
    double s_max = 0.0;  // Dirichlet point, one spacing past the last node
    double step = 0.0;
    std::vector<double> nodes;
    std::vector<double> sigma;
    std::vector<double> quad_weights;  // exact cell masses of the linear weight

    // s_max == 0 picks the default max(8, min(sqrt(omega), 12)); explicit
    // values must not fall below that.
    static RadialGrid make(double omega, std::size_t n_s = 16384, double s_max = 0.0);
    // symmetric [-s_half, s_half] with sigma == 1, for the formal
    // omega = infinity operator -d^2/ds^2 + U
    static RadialGrid reference(double s_half, std::size_t n_s);

    std::size_t size() const { return nodes.size(); }
    double sigmaAt(double s) const;
};

struct TridiagOperator {
    std::vector<double> diag;  // size n
    std::vector<double> sub;   // size n-1, couples row i+1 to i
    std::vector<double> sup;   // size n-1, couples row i to i+1

    std::vector<double> apply(const std::vector<double>& u) const;
};

TridiagOperator assembleH1d(const RadialGrid& grid, const PotentialSpec& spec);

struct TransverseEigenResult {
    double lambda = 0.0;
    double lambda_prime = 0.0;
    std::vector<double> phi;     // ground state, positive, unit norm in sigma ds
    double residual = 0.0;       // ||H phi - lambda phi|| in the sigma norm
    double Lambda = 0.0;         // lambda + 1
    double Lambda_prime = 0.0;   // min(lambda_prime + 1, lambda + 3)
    std::vector<double> higher;  // eigenvalues 3..n_eigs when requested
};

TransverseEigenResult solveTransverse(const RadialGrid& grid, const PotentialSpec& spec,
                                      int n_eigs = 2);

struct ConvergenceMetrics {
    double l2_err;
    double grad_err;
    double weighted_err;
    double l4_err;
};

// Distance of phi to the unit Gaussian in plain ds over the grid range.
ConvergenceMetrics groundStateConvergence(const RadialGrid& grid,
                                          const TransverseEigenResult& result);

// max over the grid of (phi + |phi'|) e^{+c s^2}; requires 0 < c < 0.45.
double decayCheck(const RadialGrid& grid, const TransverseEigenResult& result, double c);

// quintic smoothstep: 0 on [0,1], 1 on [2,inf), C^2 across the joints
double cutoffProfile(double x);
// cutoffProfile(s + sqrt(omega)): vanishes near the coordinate origin
double cutoffChi(double omega, double s);

// pi^{-1/4} e^{-x^2/2}, unit L^2(dx) norm
double unitGaussian(double x);

}  // namespace torusgpe
