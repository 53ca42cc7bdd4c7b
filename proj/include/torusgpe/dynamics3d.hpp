#pragma once
// Time evolution of the ring-trap cubic flow and the harness that measures
// how fast it collapses onto the circle dynamics as the trap tightens.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

#include "torusgpe/circle1d.hpp"
#include "torusgpe/core3d.hpp"
#include "torusgpe/sweep.hpp"

namespace torusgpe {

// a pivot of the propagator factor degenerated (never expected for the
// unitary steps; kept as a hard diagnostic)
struct LinearSolveFailed : std::runtime_error {
    explicit LinearSolveFailed(const std::string& what) : std::runtime_error(what) {}
};

// mass left its conservation envelope: the step size or grid is unusable
struct NormExplosion : std::runtime_error {
    NormExplosion(const std::string& what, double drift_)
        : std::runtime_error(what), drift(drift_) {}
    double drift;
};

struct EvolveConfig {
    double dt = 0.0;  // |dt| <= 1e-2/omega; negative runs the flow backward
    double T = 0.0;   // horizon, >= |dt|; stepped as T/round(T/|dt|)
    double omega = 0.0;
    int kappa = -1;
    double Lambda = 0.0;  // separable bottom eigenvalue solved on the grid
    std::size_t record_every = 1;
};

struct EvolutionTrace {
    std::vector<double> times;
    std::vector<double> mass_series;
    std::vector<double> energy_series;
    std::vector<double> remainder_series;  // || v - v_par Phi~ || in L2(sigma)
    std::vector<CircleField> v_par_snapshots;
    Field3D v_final;          // state at t = T (t = -T when dt < 0)
    double h3_initial = 0.0;  // planar seminorm^2 of v0, before any step
};

struct H3Check {
    double value = 0.0;  // planar seminorm^2 of v0
    bool pass = false;   // value <= delta^2 * omega, the admissible tube
};

// The transverse-excitation budget of initial data; evolve3d assumes the
// focusing caller checked it.
H3Check checkH3(const Field3D& v0, double delta, double Lambda);

// Symmetric splitting: exact pointwise cubic phase around a unitary linear
// step. The linear propagator factors per angular mode into commuting radial
// and axial rational (Cayley) pieces, each self-adjoint in the grid weights,
// so mass is conserved to roundoff and the local error stays third order.
// Records every record_every steps plus the initial and final states.
// Throws LinearSolveFailed, NormExplosion, std::invalid_argument.
EvolutionTrace evolve3d(const Field3D& v0, const EvolveConfig& cfg);

struct HarnessConfig {
    double T = 1.0;
    int kappa = -1;
    double dt_scale = 1e-2;  // per-omega step dt = dt_scale / omega
    double delta = 0.05;     // admission level for the initial data
    std::size_t n_z = 128;
    std::size_t n_theta = 16;
    double z_max = 8.0;
    double radial_step = 0.2;   // target spacing; node count rounds up
    std::size_t samples = 100;  // target number of recorded times
};

struct HarnessReport {
    ConvergenceReport remainder;   // sup_t || v - v_par Phi~ ||, rate fitted
    ConvergenceReport trajectory;  // max_t || v_par - w_1d || on the circle
};

// Threads w0 through the truncated transverse profile at each omega, evolves
// on [0, T], and compares the parallel component against the circle solver
// started from w0 with the same step. remainder.pass demands slope <= -0.4
// with rms log-misfit < 0.15; trajectory.pass demands monotone decrease.
HarnessReport reductionHarness(const CircleField& w0, const std::vector<double>& omega_list,
                               const HarnessConfig& cfg);

}  // namespace torusgpe
