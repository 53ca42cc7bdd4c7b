#pragma once
// Periodic 1D cubic NLS on the circle: ground-state branches (constant and
// dnoidal), the energy functional, the linearized operator spectrum, and
// split-step time evolution.

#include <complex>
#include <stdexcept>
#include <vector>

#include "torusgpe/elliptic.hpp"

namespace torusgpe {

struct CircleField {
    std::vector<std::complex<double>> values; // equispaced on [0, 2*pi)

    static CircleField zeros(int n_theta);
    int size() const { return static_cast<int>(values.size()); }
};

// N_theta must be a power of two, at least 8; values must be finite.
void validateCircleField(const CircleField& w);

enum class Branch { Constant, Dnoidal };

struct DnoidalGroundState {
    Branch branch;
    int kappa;      // +1 defocusing, -1 focusing
    double m;       // mass
    double k;       // modulus, dnoidal branch only (0 on the constant branch)
    double alpha;   // dnoidal branch only
    double beta;    // dnoidal branch only
    double mu_inf;  // Lagrange multiplier
};

// Thrown when the dnoidal spectrum is requested at the degenerate mass
// m = 2*pi^2, where the two branches collide.
class DegenerateBranch : public std::domain_error {
public:
    DegenerateBranch() : std::domain_error("m = 2*pi^2: branch is degenerate") {}
};

// Branch rules: kappa=+1 always constant; kappa=-1 constant for m <= 2*pi^2
// and dnoidal above. The dnoidal profile is peaked at theta = 0.
DnoidalGroundState groundState1d(double m, int kappa);

// Profile value Q_inf(theta).
double groundStateValue(const DnoidalGroundState& gs, double theta);

// Profile sampled on the equispaced grid (purely real field).
CircleField sampleGroundState(const DnoidalGroundState& gs, int n_theta);

// E[w] = 1/2 ||w'||^2 + (kappa/8pi) ||w||_L4^4 by spectral derivative and
// the exact equispaced quadrature.
double energy1d(const CircleField& w, int kappa);

double mass1d(const CircleField& w);

// H1(S^1) distance of two node samplings via the spectral derivative.
double h1Distance(const CircleField& a, const CircleField& b);

struct EigenPair {
    double value;
    std::vector<double> vector; // sampled on the N_theta grid, unit l2 norm
};

// Lowest n_eigs eigenvalues of the linearized operator around the ground
// state, acting on real perturbations; dense solve, N_theta <= 2048.
std::vector<EigenPair> linearizedSpectrum1d(const DnoidalGroundState& gs, int n_eigs,
                                            int n_theta);

// Smallest eigenvalue of the linearized operator restricted to the discrete
// orthogonal complement of span{Q_inf, dQ_inf/dtheta}.
double coercivityConstant1d(const DnoidalGroundState& gs, int n_theta);

// Strang split-step evolution of i w_t = -w_theta_theta + (kappa/2pi)|w|^2 w.
// Returns the trajectory including the initial state; steps are T/n with
// n = round(T/dt) so the requested horizon is hit exactly.
std::vector<CircleField> evolve1d(const CircleField& w0, int kappa, double dt, double T);

} // namespace torusgpe
