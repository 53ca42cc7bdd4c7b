#pragma once
// Tensor grids and complex fields on [-sqrt(omega), s_max] x [-z_max, z_max]
// x S^1, the weighted mass/energy functionals, and the truncated-profile
// projection that splits a field into its circle component and remainder.

#include <complex>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "torusgpe/circle1d.hpp"
#include "torusgpe/potentials.hpp"
#include "torusgpe/transverse.hpp"

namespace torusgpe {

// Storage is theta-fastest: index (i_s, j_z, l_theta) lives at
// (i_s * nZ() + j_z) * nTheta() + l_theta. Axial nodes are the inclusive
// symmetric lattice with trapezoid weights; the angle uses the exact
// rectangle rule with nodes 2 pi l / N_theta.
struct Grid3D {
    RadialGrid radial;
    PotentialSpec potential;
    double z_max = 0.0;
    double z_step = 0.0;
    std::vector<double> z_nodes;
    std::vector<double> z_weights;
    std::size_t n_theta = 0;
    double theta_weight = 0.0;  // 2 pi / N_theta

    // radial trap samples and half-node sigma fluxes, shared by the energy
    // form and the operator assemblies
    std::vector<double> u_samples;
    std::vector<double> sigma_half;  // sigma(s_i + h/2), i = 0..N_s-1

    // L^2(1/sigma) node weights. The first node sits at sigma = 0 where the
    // continuum integral is singular; its weight uses the half-cell edge
    // value, (h/2)/sigma(s_min + h/2) = sqrt(omega), a constant of the
    // method. Flat reference grids get the plain trapezoid weight.
    std::vector<double> inv_sigma_weights;

    // z_max >= 8, N_z >= 128, N_theta a power of two >= 16
    static std::shared_ptr<const Grid3D> make(const RadialGrid& radial,
                                              const PotentialSpec& potential, double z_max,
                                              std::size_t n_z, std::size_t n_theta);

    std::size_t nS() const { return radial.size(); }
    std::size_t nZ() const { return z_nodes.size(); }
    std::size_t nTheta() const { return n_theta; }
    std::size_t points() const { return nS() * nZ() * n_theta; }
    double thetaNode(std::size_t l) const;
};

struct Field3D {
    std::shared_ptr<const Grid3D> grid;
    std::vector<std::complex<double>> values;

    static Field3D zeros(std::shared_ptr<const Grid3D> g);

    std::complex<double>& at(std::size_t i, std::size_t j, std::size_t l) {
        return values[(i * grid->nZ() + j) * grid->nTheta() + l];
    }
    const std::complex<double>& at(std::size_t i, std::size_t j, std::size_t l) const {
        return values[(i * grid->nZ() + j) * grid->nTheta() + l];
    }
};

// All values finite, dimensions match the grid.
void validateField(const Field3D& v);

// Sample f(s, z, theta) on the grid.
template <class F>
Field3D makeField(std::shared_ptr<const Grid3D> g, F f) {
    Field3D v = Field3D::zeros(g);
    std::size_t k = 0;
    for (std::size_t i = 0; i < g->nS(); ++i)
        for (std::size_t j = 0; j < g->nZ(); ++j)
            for (std::size_t l = 0; l < g->nTheta(); ++l, ++k)
                v.values[k] = f(g->radial.nodes[i], g->z_nodes[j], g->thetaNode(l));
    return v;
}

// v(s,z,theta) = omega^{1/4} u(sqrt(omega)+s, z, theta): the weighted mass of
// v equals the Cartesian mass of the cylindrical profile u exactly.
template <class F>
Field3D fieldFromCylindrical(std::shared_ptr<const Grid3D> g, F u) {
    const double sq = std::sqrt(g->radial.omega);
    const double amp = std::pow(g->radial.omega, 0.25);
    return makeField(g, [&](double s, double z, double th) {
        return amp * u(sq + s, z, th);
    });
}

// integral of |v|^2 sigma ds dz dtheta
double massMod(const Field3D& v);

// ||v||^2_{L^2(1/sigma)} with the documented first-node regularization
double normInvSigma2(const Field3D& v);

// <(H2d - Lambda) v, v> summed over theta nodes: nonnegative gradient +
// potential - Lambda mass quadratic form of the transverse operator
double szSeminorm2(const Field3D& v, double Lambda);

// sum_l l^2 |v_l|^2 node weights in L^2(1/sigma), theta by Fourier multiplier
double thetaSeminorm2(const Field3D& v);

struct EnergyBreakdown {
    double total = 0.0;
    double sz_seminorm2 = 0.0;
    double theta_seminorm2 = 0.0;
    double quartic = 0.0;  // ||v||^4_{L^4(sigma)}
};

// total = (omega/2) sz + (1/2) theta + (kappa/4) quartic; Lambda must be the
// eigenvalue solved on this grid
EnergyBreakdown energyMod(const Field3D& v, int kappa, double Lambda);

struct ProjectionBasis {
    std::shared_ptr<const Grid3D> grid;
    std::size_t n_z = 0;
    std::vector<double> phi_s;  // transverse ground state, unit L^2(sigma ds)
    std::vector<double> phi_z;  // axial ground state, unit L^2(dz)
    double lambda_s = 0.0;
    double lambda_s_prime = 0.0;
    double nu_z = 0.0;
    double nu_z_prime = 0.0;
    double Lambda = 0.0;        // lambda_s + nu_z, ground 2D eigenvalue
    double Lambda_prime = 0.0;  // next 2D eigenvalue above Lambda
    std::vector<double> Phi;        // N_s*N_z product, unit L^2(sigma ds dz)
    std::vector<double> Phi_tilde;  // cutoff-truncated and renormalized
    double norm_chi_phi = 0.0;      // ||chi Phi|| before renormalization

    double phiAt(std::size_t i, std::size_t j) const { return Phi[i * n_z + j]; }
    double phiTildeAt(std::size_t i, std::size_t j) const { return Phi_tilde[i * n_z + j]; }
};

// Solves the transverse and axial ground states on the grid and assembles
// the truncated product profile. Phi_tilde vanishes on s in
// [-sqrt(omega), -sqrt(omega)+1] by construction of the cutoff.
ProjectionBasis buildProjectionBasis(std::shared_ptr<const Grid3D> grid);

struct ProjectionResult {
    CircleField v_par;
    Field3D v_perp;
};

// v_par(theta_l) = <v(.,.,theta_l), Phi_tilde>_{L^2(sigma ds dz)};
// v_perp = v - v_par Phi_tilde. Discretely orthogonal by construction.
ProjectionResult project(const Field3D& v, const ProjectionBasis& basis);

// Same contraction against the untruncated profile Phi.
CircleField projectUntruncated(const Field3D& v, const ProjectionBasis& basis);

// w(theta) spread along the truncated profile: v(s,z,theta) = Phi_tilde(s,z) w(theta).
// w must match the grid's N_theta.
Field3D threadCircleField(const CircleField& w, const ProjectionBasis& basis);

// Flat binary snapshot (header: omega, N_s, N_z, N_theta, s_max, z_max as
// 8-byte little-endian fields, then complex values theta-fastest) plus a
// JSON sidecar at path + ".json". Tabulated potentials and flat reference
// grids do not round-trip and are rejected.
void saveField(const Field3D& v, const std::string& path);
Field3D loadField(const std::string& path);

}  // namespace torusgpe
