#include "torusgpe/dynamics3d.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "symtridiag.hpp"
#include "torusgpe/dft.hpp"
#include "torusgpe/kernels.hpp"
#include "torusgpe/transverse.hpp"

namespace torusgpe {
namespace {

using cplx = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Crank-Nicolson propagator of the linear part
//   L = omega (H_s + H_z - Lambda) + l^2 c(s),   c = invW / w,
// factored per angular mode l as cay(A_s(l)) cay(B_z) with
//   A_s(l) = omega (H_s - lambda_s) + l^2 c(s),   B_z = omega (H_z - nu_z).
// The two pieces are resolvent factors of commuting Kronecker terms, so the
// product is a consistent second-order rational approximation of exp(-ihL)
// with no splitting error between them, and each factor is unitary in the
// grid weights because the underlying tridiagonals are self-adjoint there.
// Splitting Lambda into its radial and axial shares keeps every mode free of
// the spurious counter-rotating phases an uneven split would leave behind.
//
// Tables hold the fused forward-elimination coefficients of both factors so
// a step is two streaming sweeps over the field plus the angular transforms.
struct Propagator {
    std::size_t ns, nz, nt;
    // radial factor, one coefficient set per (plane, theta slot)
    std::vector<cplx> ra, rb, rg, rsub, rinvd, rcp;
    // axial factor, one scalar set per z row
    std::vector<cplx> za, zb, zg, zsub, zinvd, zcp;
    std::vector<cplx> prev, hold, rowscratch;

    Propagator(const Grid3D& g, const ProjectionBasis& basis, double gamma)
        : ns(g.nS()), nz(g.nZ()), nt(g.nTheta()) {
        const double omega = g.radial.omega;
        const cplx ig(0.0, gamma);

        const auto h1d = assembleH1d(g.radial, g.potential);
        ra.resize(ns * nt);
        rb.resize(ns * nt);
        rg.resize(ns * nt);
        rsub.resize(ns * nt);
        rinvd.resize(ns * nt);
        rcp.resize(ns * nt);
        std::vector<cplx> carry(nt, cplx(0.0));
        for (std::size_t i = 0; i < ns; ++i) {
            const double lo = (i > 0) ? omega * h1d.sub[i - 1] : 0.0;
            const double up = (i + 1 < ns) ? omega * h1d.sup[i] : 0.0;
            const double d0 = omega * (h1d.diag[i] - basis.lambda_s);
            const double c = g.inv_sigma_weights[i] / g.radial.quad_weights[i];
            for (std::size_t k = 0; k < nt; ++k) {
                const double l = dft::frequency(static_cast<int>(k), static_cast<int>(nt));
                const double dd = d0 + l * l * c;
                const std::size_t at = i * nt + k;
                rb[at] = 1.0 - ig * dd;
                ra[at] = -ig * lo;
                rg[at] = -ig * up;
                rsub[at] = ig * lo;
                const cplx m = (1.0 + ig * dd) - rsub[at] * carry[k];
                if (!(std::abs(m) > 1e-12))
                    throw LinearSolveFailed("radial propagator pivot degenerated");
                rinvd[at] = 1.0 / m;
                rcp[at] = ig * up * rinvd[at];
                carry[k] = rcp[at];
            }
        }

        const auto tz = detail::assembleAxialTridiag(g.z_nodes, g.z_weights, g.z_step);
        za.resize(nz);
        zb.resize(nz);
        zg.resize(nz);
        zsub.resize(nz);
        zinvd.resize(nz);
        zcp.resize(nz);
        cplx zc(0.0);
        for (std::size_t j = 0; j < nz; ++j) {
            // tz is the sqrt-weight symmetric form; undo the similarity to act
            // on plain field values
            const double lo =
                (j > 0) ? omega * tz.e[j - 1] * std::sqrt(g.z_weights[j - 1] / g.z_weights[j])
                        : 0.0;
            const double up =
                (j + 1 < nz) ? omega * tz.e[j] * std::sqrt(g.z_weights[j + 1] / g.z_weights[j])
                             : 0.0;
            const double dd = omega * (tz.d[j] - basis.nu_z);
            zb[j] = 1.0 - ig * dd;
            za[j] = -ig * lo;
            zg[j] = -ig * up;
            zsub[j] = ig * lo;
            const cplx m = (1.0 + ig * dd) - zsub[j] * zc;
            if (!(std::abs(m) > 1e-12))
                throw LinearSolveFailed("axial propagator pivot degenerated");
            zinvd[j] = 1.0 / m;
            zcp[j] = ig * up * zinvd[j];
            zc = zcp[j];
        }

        prev.resize(nz * nt);
        hold.resize(nz * nt);
        rowscratch.resize(nt);
    }

    void apply(cplx* u) {
        const auto& k = kernels::ops();
        const std::size_t plane = nz * nt;
        dft::forwardMany(u, static_cast<int>(nt), static_cast<int>(ns * nz));
        for (std::size_t i = 0; i < ns; ++i) {
            cplx* vi = u + i * plane;
            const cplx* vp = (i + 1 < ns) ? vi + plane : vi;
            const cplx* vm = (i > 0) ? prev.data() : vi;
            const cplx* gm = (i > 0) ? vi - plane : vi;
            std::memcpy(hold.data(), vi, plane * sizeof(cplx));
            k.cyc_fwd(vi, vm, vp, gm, ra.data() + i * nt, rb.data() + i * nt, rg.data() + i * nt,
                      rsub.data() + i * nt, rinvd.data() + i * nt, plane, nt);
            std::swap(prev, hold);
        }
        for (std::size_t i = ns - 1; i-- > 0;)
            k.cyc_back(u + i * plane, u + (i + 1) * plane, rcp.data() + i * nt, plane, nt);
        for (std::size_t i = 0; i < ns; ++i) {
            cplx* pl = u + i * plane;
            k.row_fwd_plane(pl, rowscratch.data(), za.data(), zb.data(), zg.data(), zsub.data(),
                            zinvd.data(), nz, nt);
            k.row_back_plane(pl, zcp.data(), nz, nt);
        }
        dft::inverseMany(u, static_cast<int>(nt), static_cast<int>(ns * nz));
    }
};

// <v(.,.,theta_l), Phi~>, weights folded into the profile once
struct ParallelContraction {
    std::size_t ns, nz, nt;
    std::vector<double> pw;

    ParallelContraction(const Grid3D& g, const ProjectionBasis& basis)
        : ns(g.nS()), nz(g.nZ()), nt(g.nTheta()), pw(ns * nz) {
        for (std::size_t i = 0; i < ns; ++i)
            for (std::size_t j = 0; j < nz; ++j)
                pw[i * nz + j] =
                    basis.phiTildeAt(i, j) * g.radial.quad_weights[i] * g.z_weights[j];
    }

    CircleField operator()(const Field3D& v) const {
        const auto& k = kernels::ops();
        CircleField out = CircleField::zeros(static_cast<int>(nt));
        for (std::size_t i = 0; i < ns; ++i)
            k.waccum_rows(out.values.data(), v.values.data() + i * nz * nt, pw.data() + i * nz,
                          nz, nt);
        return out;
    }
};

}  // namespace

H3Check checkH3(const Field3D& v0, double delta, double Lambda) {
    validateField(v0);
    if (!(delta > 0.0)) throw std::invalid_argument("checkH3: delta must be positive");
    if (!std::isfinite(v0.grid->radial.omega))
        throw std::invalid_argument("checkH3: flat reference grids carry no tube");
    H3Check out;
    out.value = szSeminorm2(v0, Lambda);
    out.pass = out.value <= delta * delta * v0.grid->radial.omega;
    return out;
}

EvolutionTrace evolve3d(const Field3D& v0, const EvolveConfig& cfg) {
    validateField(v0);
    const auto grid = v0.grid;
    const double omega = grid->radial.omega;
    if (!std::isfinite(omega))
        throw std::invalid_argument("evolve3d: flat reference grids have no flow");
    if (cfg.omega != omega)
        throw std::invalid_argument("evolve3d: config omega does not match the grid");
    if (cfg.kappa != 1 && cfg.kappa != -1)
        throw std::invalid_argument("evolve3d: kappa must be +1 or -1");
    if (cfg.record_every == 0)
        throw std::invalid_argument("evolve3d: record_every must be positive");
    const double adt = std::abs(cfg.dt);
    if (!(adt > 0.0) || adt > 1e-2 / omega * (1.0 + 1e-12))
        throw std::invalid_argument("evolve3d: |dt| must lie in (0, 1e-2/omega]");
    if (!(cfg.T >= adt)) throw std::invalid_argument("evolve3d: horizon shorter than one step");

    const auto basis = buildProjectionBasis(grid);
    if (!(std::abs(cfg.Lambda - basis.Lambda) <= 1e-6 * (1.0 + std::abs(basis.Lambda))))
        throw std::invalid_argument("evolve3d: Lambda does not match the grid eigenvalue");

    const long n = std::max(1L, std::lround(cfg.T / adt));
    const double h = std::copysign(cfg.T / static_cast<double>(n), cfg.dt);

    Propagator prop(*grid, basis, 0.5 * h);
    const ParallelContraction par(*grid, basis);
    const auto& kn = kernels::ops();

    EvolutionTrace tr;
    tr.h3_initial = szSeminorm2(v0, basis.Lambda);
    Field3D u = v0;
    const double m0 = massMod(v0);

    const auto record = [&](double t) {
        const double mass = massMod(u);
        const double drift = std::abs(mass - m0) / std::max(m0, 1e-12);
        if (drift > 1e-4)
            throw NormExplosion("evolve3d: mass left its envelope at t = " + std::to_string(t),
                                drift);
        tr.times.push_back(t);
        tr.mass_series.push_back(mass);
        tr.energy_series.push_back(energyMod(u, cfg.kappa, basis.Lambda).total);
        CircleField w = par(u);
        tr.remainder_series.push_back(std::sqrt(std::max(0.0, mass - mass1d(w))));
        tr.v_par_snapshots.push_back(std::move(w));
    };

    record(0.0);
    // merged Strang splitting: the two half phases around every interior
    // linear step fuse exactly because the cubic phase preserves |u|
    const double full = -static_cast<double>(cfg.kappa) * h;
    kn.cubic_phase(u.values.data(), u.values.size(), 0.5 * full);
    for (long s = 1; s <= n; ++s) {
        prop.apply(u.values.data());
        const bool last = (s == n);
        if (last || s % static_cast<long>(cfg.record_every) == 0) {
            kn.cubic_phase(u.values.data(), u.values.size(), 0.5 * full);
            record(static_cast<double>(s) * h);
            if (!last) kn.cubic_phase(u.values.data(), u.values.size(), 0.5 * full);
        } else {
            kn.cubic_phase(u.values.data(), u.values.size(), full);
        }
    }
    tr.v_final = std::move(u);
    return tr;
}

namespace {

// slope/residual left at their no-fit markers when a value touches zero
void fitInto(ConvergenceReport& rep) {
    try {
        const auto f = fitRate(rep.omega_list, rep.values);
        rep.fitted_rate = f.slope;
        rep.fit_residual = f.residual;
    } catch (const NonPositiveValue&) {
        rep.fitted_rate = 0.0;
        rep.fit_residual = std::numeric_limits<double>::infinity();
    }
}

}  // namespace

HarnessReport reductionHarness(const CircleField& w0, const std::vector<double>& omega_list,
                               const HarnessConfig& cfg) {
    validateCircleField(w0);
    if (omega_list.size() < 3)
        throw std::invalid_argument("reductionHarness: need at least three omegas for the fit");
    for (std::size_t i = 0; i < omega_list.size(); ++i) {
        if (!(omega_list[i] > 0.0) || !std::isfinite(omega_list[i]))
            throw std::invalid_argument("reductionHarness: omegas must be positive");
        if (i > 0 && !(omega_list[i] > omega_list[i - 1]))
            throw std::invalid_argument("reductionHarness: omegas must ascend");
    }
    if (cfg.kappa != 1 && cfg.kappa != -1)
        throw std::invalid_argument("reductionHarness: kappa must be +1 or -1");
    if (!(cfg.T > 0.0)) throw std::invalid_argument("reductionHarness: T must be positive");
    if (!(cfg.dt_scale > 0.0) || cfg.dt_scale > 1e-2 * (1.0 + 1e-12))
        throw std::invalid_argument("reductionHarness: dt_scale must lie in (0, 1e-2]");
    if (!(cfg.radial_step > 0.0))
        throw std::invalid_argument("reductionHarness: radial_step must be positive");
    if (cfg.samples == 0)
        throw std::invalid_argument("reductionHarness: samples must be positive");
    if (static_cast<std::size_t>(w0.size()) != cfg.n_theta)
        throw std::invalid_argument("reductionHarness: w0 must live on the configured circle");

    std::vector<double> sup_rem, traj_dist;
    for (const double omega : omega_list) {
        const double span = std::sqrt(omega) + std::max(8.0, std::min(std::sqrt(omega), 12.0));
        const std::size_t n_s = std::max<std::size_t>(
            128, static_cast<std::size_t>(std::ceil(span / cfg.radial_step)));
        const auto grid = Grid3D::make(RadialGrid::make(omega, n_s),
                                       PotentialSpec::quadratic(omega), cfg.z_max, cfg.n_z,
                                       cfg.n_theta);
        const auto basis = buildProjectionBasis(grid);

        const Field3D v0 = threadCircleField(w0, basis);
        if (!checkH3(v0, cfg.delta, basis.Lambda).pass)
            throw std::invalid_argument("reductionHarness: initial data outside the tube");

        const double dt = cfg.dt_scale / omega;
        const long n = std::max(1L, std::lround(cfg.T / dt));
        EvolveConfig ec;
        ec.dt = dt;
        ec.T = cfg.T;
        ec.omega = omega;
        ec.kappa = cfg.kappa;
        ec.Lambda = basis.Lambda;
        ec.record_every = std::max<std::size_t>(
            1, static_cast<std::size_t>(n / static_cast<long>(cfg.samples)));
        const auto tr = evolve3d(v0, ec);
        sup_rem.push_back(
            *std::max_element(tr.remainder_series.begin(), tr.remainder_series.end()));

        const auto w1d = evolve1d(w0, cfg.kappa, dt, cfg.T);
        const double hstep = cfg.T / static_cast<double>(n);
        double worst = 0.0;
        for (std::size_t r = 0; r < tr.times.size(); ++r) {
            const auto step = static_cast<std::size_t>(std::lround(tr.times[r] / hstep));
            const auto& a = tr.v_par_snapshots[r].values;
            const auto& b = w1d[step].values;
            double d2 = 0.0;
            for (std::size_t l = 0; l < a.size(); ++l) d2 += std::norm(a[l] - b[l]);
            worst = std::max(worst, std::sqrt(d2 * kTwoPi / static_cast<double>(a.size())));
        }
        traj_dist.push_back(worst);
    }

    HarnessReport rep;
    rep.remainder.omega_list = omega_list;
    rep.remainder.metric_name = "sup_remainder_l2sigma";
    rep.remainder.values = sup_rem;
    fitInto(rep.remainder);
    rep.remainder.pass = rep.remainder.fitted_rate <= -0.4 && rep.remainder.fit_residual < 0.15;

    rep.trajectory.omega_list = omega_list;
    rep.trajectory.metric_name = "trajectory_distance_l2circle";
    rep.trajectory.values = traj_dist;
    fitInto(rep.trajectory);
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < traj_dist.size(); ++i)
        decreasing = decreasing && traj_dist[i + 1] < traj_dist[i];
    rep.trajectory.pass = decreasing;
    return rep;
}

}  // namespace torusgpe
