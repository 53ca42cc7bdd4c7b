#pragma once
// Constrained minimization of the ring energy at fixed mass via a normalized
// semi-implicit gradient flow, plus diagnostics: closeness to the threaded 1D
// ground state, a weighted interpolation-constant probe, coercivity of the
// linearized operator, and the kinetic-bound fit.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>

#include "torusgpe/circle1d.hpp"
#include "torusgpe/core3d.hpp"

namespace torusgpe {

// the flow hit the kinetic constraint boundary: delta or omega is too small
struct ConstraintActive : std::runtime_error {
    ConstraintActive(const std::string& what, double margin_)
        : std::runtime_error(what), margin(margin_) {}
    double margin;
};

// energy refused to descend even at the smallest allowed pseudo-time step
struct StepSizeError : std::runtime_error {
    StepSizeError(const std::string& what, double dt_) : std::runtime_error(what), dt(dt_) {}
    double dt;
};

struct MinimizeConfig {
    double omega = 0.0;
    double m = 0.0;
    int kappa = -1;
    double delta = 0.05;        // kinetic constraint level, fraction of sqrt(omega)
    double tol_energy = 1e-10;  // relative per-step energy decrease marking a stall
    double tol_grad = 1e-8;     // Euler-Lagrange residual scale at convergence
    std::size_t max_iters = 4000;
    double dt_flow = 0.02;      // initial pseudo-time step; adapted during the flow
    // empty: thread the 1D ground state through the product basis
    std::optional<Field3D> warm_start;
};

struct MinimizerDiagnostics {
    double sz_seminorm = 0.0;     // ||Q|| in the planar seminorm
    double theta_seminorm = 0.0;  // ||dQ/dtheta|| in the inverse weight
    CircleField Q_par;
    double perp_mass = 0.0;
    double perp_theta_seminorm = 0.0;
    double constraint_margin = 0.0;  // delta*sqrt(omega) - sz_seminorm, positive
};

struct MinimizerResult {
    Field3D Q;  // phase-fixed: near-real, nonnegative, peak of |Q_par| at theta = 0
    double omega = 0.0;
    double m = 0.0;
    int kappa = -1;
    double mu = 0.0;      // multiplier from the quadratic-form identity
    double energy = 0.0;  // attained minimum
    double el_residual = 0.0;
    double Lambda = 0.0;  // separable eigenvalue used in all seminorms
    std::size_t iterations = 0;
    MinimizerDiagnostics diagnostics;
};

// Normalized gradient flow in pseudo-time: the linear part and the multiplier
// shift are treated implicitly with an exact per-mode solve, the cubic term
// explicitly, followed by mass renormalization. The step size adapts: it
// shrinks when a step would raise the energy and grows on clean streaks.
// Converged when the relative energy decrease stalls below tol_energy AND the
// Euler-Lagrange residual in L2(sigma) falls under tol_grad*(1+|mu|)*||Q||.
// Throws ConstraintActive, StepSizeError, NoConvergence.
MinimizerResult minimize(const MinimizeConfig& cfg, const PotentialSpec& spec,
                         std::shared_ptr<const Grid3D> grid);

struct ReductionReport {
    double sigma_distance;  // full weighted distance to Q_inf(theta) chi(s) G(s)G(z)
    double adprop;          // omega * sz_seminorm^2 + perp_theta_seminorm^2
    double energy_gap;      // |energy - circle minimum at the same mass|
};

// Distances of a converged minimizer from the formal thin-ring limit profile.
ReductionReport dimensionReductionReport(const MinimizerResult& res,
                                         const DnoidalGroundState& gs);

// Max over a seeded ensemble of Gaussian-envelope x low-Fourier fields of
//   ||v||^4_{L4(sigma)} / ( ||v||_2 { sqrt(omega) sz^2 szw + ||v||_2^2 th + ||v||_2^3 } ),
// the constant in the refined quartic interpolation bound. Deterministic.
double gnCheck(std::size_t ensemble_size, std::shared_ptr<const Grid3D> grid, double Lambda,
               std::uint64_t seed);

struct CoercivityReport {
    double eigenvalue;        // smallest on the complement of span{Q, dQ/dtheta}
    double kernel_residual;   // ||L dQ/dtheta|| / ||dQ/dtheta|| in L2(sigma)
    double q_quadratic_form;  // <L Q, Q>, expected negative
    bool borderline_mass;     // within 0.5 of the branch-degenerate mass 2 pi^2
};

// Assembles the linearization L = omega(H-Lambda) - sigma^{-2} d_theta^2 + mu
// - 3Q^2 on real perturbations and finds its lowest eigenvalue orthogonal to
// the phase and rotation directions by preconditioned Rayleigh-quotient
// descent. Focusing minimizers only. Throws NoConvergence.
CoercivityReport coercivityCheck(const MinimizerResult& res);

// omega * sz_seminorm^2 + theta_seminorm^2 of a converged minimizer whose
// energy is at most E_bound: the fitted constant of the kinetic bound.
double forbiddenRegionCheck(const MinimizerResult& res, double E_bound);

}  // namespace torusgpe
