#include "torusgpe/minimizer3d.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "symtridiag.hpp"
#include "torusgpe/dft.hpp"
#include "torusgpe/kernels.hpp"
#include "torusgpe/transverse.hpp"

namespace torusgpe {
namespace {

using cplx = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Exact application / inversion of the linear part
//   L = omega (H_s + H_z - Lambda) + l^2 c(s),  c = invW / w,
// one angular mode l at a time, in flux-symmetrized coordinates
// x = sqrt(w_i wz_j) v. The axial factor is diagonalized densely once; every
// (mode, axial eigencolumn) pair then leaves a real SPD tridiagonal system in
// s. Shifting by c0 > 0 keeps the systems positive definite because Lambda is
// the bottom of the discrete separable spectrum.
struct ModeWorkspace {
    std::shared_ptr<const Grid3D> grid;
    double omega;
    double Lambda;
    detail::SymTridiag ts;
    std::vector<double> es;    // omega * ts.e
    std::vector<double> base;  // omega * (ts.d - Lambda)
    std::vector<double> csq;   // angular coefficient per radial node
    Eigen::MatrixXd V;         // axial eigenvectors, columns
    Eigen::VectorXd tau;       // axial eigenvalues
    std::vector<double> scale, inv_scale;  // sqrt(w_i wz_j), row-major ns x nz

    Eigen::MatrixXcd slice, zed;  // ns x nz scratch
    std::vector<double> dd, cp;
    std::vector<cplx> tmpc;

    ModeWorkspace(std::shared_ptr<const Grid3D> g, double Lambda_)
        : grid(std::move(g)), omega(grid->radial.omega), Lambda(Lambda_) {
        const auto& rad = grid->radial;
        const std::size_t ns = grid->nS(), nz = grid->nZ();
        ts = detail::symmetrized(assembleH1d(rad, grid->potential), rad.quad_weights);
        es.resize(ns - 1);
        for (std::size_t i = 0; i + 1 < ns; ++i) es[i] = omega * ts.e[i];
        base.resize(ns);
        csq.resize(ns);
        for (std::size_t i = 0; i < ns; ++i) {
            base[i] = omega * (ts.d[i] - Lambda);
            csq[i] = grid->inv_sigma_weights[i] / rad.quad_weights[i];
        }
        const auto tz = detail::assembleAxialTridiag(grid->z_nodes, grid->z_weights, grid->z_step);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> saes;
        saes.computeFromTridiagonal(
            Eigen::Map<const Eigen::VectorXd>(tz.d.data(), static_cast<Eigen::Index>(tz.d.size())),
            Eigen::Map<const Eigen::VectorXd>(tz.e.data(), static_cast<Eigen::Index>(tz.e.size())),
            Eigen::ComputeEigenvectors);
        V = saes.eigenvectors();
        tau = saes.eigenvalues();
        scale.resize(ns * nz);
        inv_scale.resize(ns * nz);
        for (std::size_t i = 0; i < ns; ++i)
            for (std::size_t j = 0; j < nz; ++j) {
                const double s = std::sqrt(rad.quad_weights[i] * grid->z_weights[j]);
                scale[i * nz + j] = s;
                inv_scale[i * nz + j] = 1.0 / s;
            }
        slice.resize(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(nz));
        zed.resizeLike(slice);
        dd.resize(ns);
        cp.resize(ns);
        tmpc.resize(ns);
    }

    // buf holds a full field, theta fastest; solve ? (c0 + L)^{-1} buf : L buf
    void process(cplx* buf, double c0, bool solve) {
        const std::size_t ns = grid->nS(), nz = grid->nZ(), nt = grid->nTheta();
        dft::forwardMany(buf, static_cast<int>(nt), static_cast<int>(ns * nz));
        Eigen::Map<Eigen::MatrixXd> sr(reinterpret_cast<double*>(slice.data()),
                                       static_cast<Eigen::Index>(2 * ns),
                                       static_cast<Eigen::Index>(nz));
        Eigen::Map<Eigen::MatrixXd> zr(reinterpret_cast<double*>(zed.data()),
                                       static_cast<Eigen::Index>(2 * ns),
                                       static_cast<Eigen::Index>(nz));
        for (std::size_t k = 0; k < nt; ++k) {
            const double l = dft::frequency(static_cast<int>(k), static_cast<int>(nt));
            const double ll = l * l;
            for (std::size_t j = 0; j < nz; ++j)
                for (std::size_t i = 0; i < ns; ++i)
                    slice(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        buf[(i * nz + j) * nt + k] * scale[i * nz + j];
            zr.noalias() = sr * V;
            for (std::size_t q = 0; q < nz; ++q) {
                const double ot = omega * tau[static_cast<Eigen::Index>(q)];
                for (std::size_t i = 0; i < ns; ++i)
                    dd[i] = c0 + base[i] + ot + ll * csq[i];
                cplx* col = zed.data() + q * ns;
                if (solve) {
                    double m = dd[0];
                    cp[0] = es[0] / m;
                    col[0] /= m;
                    for (std::size_t i = 1; i < ns; ++i) {
                        m = dd[i] - es[i - 1] * cp[i - 1];
                        if (i + 1 < ns) cp[i] = es[i] / m;
                        col[i] = (col[i] - es[i - 1] * col[i - 1]) / m;
                    }
                    for (std::size_t i = ns - 1; i-- > 0;) col[i] -= cp[i] * col[i + 1];
                } else {
                    for (std::size_t i = 0; i < ns; ++i) {
                        cplx y = dd[i] * col[i];
                        if (i > 0) y += es[i - 1] * col[i - 1];
                        if (i + 1 < ns) y += es[i] * col[i + 1];
                        tmpc[i] = y;
                    }
                    std::copy(tmpc.begin(), tmpc.end(), col);
                }
            }
            sr.noalias() = zr * V.transpose();
            for (std::size_t j = 0; j < nz; ++j)
                for (std::size_t i = 0; i < ns; ++i)
                    buf[(i * nz + j) * nt + k] =
                        slice(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                        inv_scale[i * nz + j];
        }
        dft::inverseMany(buf, static_cast<int>(nt), static_cast<int>(ns * nz));
    }

    void solveShifted(Field3D& v, double c0) { process(v.values.data(), c0, true); }

    void applyLin(const Field3D& v, Field3D& out) {
        out.values = v.values;
        process(out.values.data(), 0.0, false);
    }
};

double multiplierOf(const EnergyBreakdown& eb, double omega, int kappa, double m) {
    return -(omega * eb.sz_seminorm2 + eb.theta_seminorm2 + kappa * eb.quartic) / m;
}

void renormMass(Field3D& v, double m) {
    const double cur = massMod(v);
    if (!(cur > 0.0) || !std::isfinite(cur))
        throw NoConvergence("minimize: mass collapsed during the flow", cur);
    const double f = std::sqrt(m / cur);
    for (auto& x : v.values) x *= f;
}

// || L Q + kappa |Q|^2 Q + mu Q ||_{L2(sigma)}
double elResidual(ModeWorkspace& ws, const Field3D& Q, int kappa, double mu, Field3D& scratch) {
    ws.applyLin(Q, scratch);
    const double kap = kappa;
    for (std::size_t p = 0; p < Q.values.size(); ++p)
        scratch.values[p] += (kap * std::norm(Q.values[p]) + mu) * Q.values[p];
    return std::sqrt(massMod(scratch));
}

Field3D threadedStart(const std::shared_ptr<const Grid3D>& grid, const ProjectionBasis& basis,
                      double m, int kappa) {
    const auto gs = groundState1d(m, kappa);
    const CircleField w = sampleGroundState(gs, static_cast<int>(grid->nTheta()));
    Field3D v = Field3D::zeros(grid);
    const std::size_t nz = grid->nZ(), nt = grid->nTheta();
    for (std::size_t i = 0; i < grid->nS(); ++i)
        for (std::size_t j = 0; j < nz; ++j) {
            const double phi = basis.phiTildeAt(i, j);
            if (phi == 0.0) continue;
            cplx* row = v.values.data() + (i * nz + j) * nt;
            for (std::size_t k = 0; k < nt; ++k) row[k] = w.values[k] * phi;
        }
    return v;
}

// Angle maximizing |q|^2 of the trigonometric interpolant; 0 for flat traces.
double peakAngle(const CircleField& q) {
    const int n = q.size();
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    int k0 = 0;
    for (int k = 0; k < n; ++k) {
        const double a = std::norm(q.values[static_cast<std::size_t>(k)]);
        if (a > hi) {
            hi = a;
            k0 = k;
        }
        lo = std::min(lo, a);
    }
    if (!(hi > 0.0) || hi - lo <= 1e-9 * hi) return 0.0;
    std::vector<cplx> qh(q.values);
    dft::forward(qh.data(), n);
    const auto eval = [&](double t, int order) {
        cplx acc = 0.0;
        for (int k = 0; k < n; ++k) {
            const double l = dft::frequency(k, n);
            cplx f = qh[static_cast<std::size_t>(k)] * std::exp(cplx(0.0, l * t)) / double(n);
            for (int o = 0; o < order; ++o) f *= cplx(0.0, l);
            acc += f;
        }
        return acc;
    };
    double th = k0 * kTwoPi / n;
    const double cell = kTwoPi / n;
    for (int it = 0; it < 40; ++it) {
        const cplx q0 = eval(th, 0), q1 = eval(th, 1), q2 = eval(th, 2);
        const double g = 2.0 * std::real(q1 * std::conj(q0));
        const double gp = 2.0 * std::real(q2 * std::conj(q0)) + 2.0 * std::norm(q1);
        if (!(std::abs(gp) > 1e-12 * hi)) break;
        const double step = std::clamp(-g / gp, -0.75 * cell, 0.75 * cell);
        th += step;
        if (std::abs(step) < 1e-14) break;
    }
    return th;
}

void rotateTheta(Field3D& v, double angle) {
    if (angle == 0.0) return;
    const std::size_t nt = v.grid->nTheta(), rows = v.grid->nS() * v.grid->nZ();
    dft::forwardMany(v.values.data(), static_cast<int>(nt), static_cast<int>(rows));
    std::vector<cplx> ph(nt);
    for (std::size_t k = 0; k < nt; ++k)
        ph[k] = std::exp(cplx(0.0, dft::frequency(static_cast<int>(k), static_cast<int>(nt)) *
                                       angle));
    for (std::size_t r = 0; r < rows; ++r) {
        cplx* row = v.values.data() + r * nt;
        for (std::size_t k = 0; k < nt; ++k) row[k] *= ph[k];
    }
    dft::inverseMany(v.values.data(), static_cast<int>(nt), static_cast<int>(rows));
}

void fixGlobalPhase(Field3D& v) {
    const auto& g = *v.grid;
    const std::size_t nz = g.nZ(), nt = g.nTheta();
    cplx acc = 0.0;
    for (std::size_t i = 0; i < g.nS(); ++i)
        for (std::size_t j = 0; j < nz; ++j) {
            const cplx* row = v.values.data() + (i * nz + j) * nt;
            cplx rs = 0.0;
            for (std::size_t k = 0; k < nt; ++k) rs += row[k];
            acc += g.radial.quad_weights[i] * g.z_weights[j] * rs;
        }
    const double mag = std::abs(acc);
    if (!(mag > 0.0)) return;
    const cplx ph = std::conj(acc) / mag;
    for (auto& x : v.values) x *= ph;
}

}  // namespace

MinimizerResult minimize(const MinimizeConfig& cfg, const PotentialSpec& spec,
                         std::shared_ptr<const Grid3D> grid) {
    if (!grid) throw std::invalid_argument("minimize: null grid");
    if (!(std::isfinite(cfg.omega) && cfg.omega > 0.0))
        throw std::invalid_argument("minimize: omega must be positive and finite");
    if (cfg.kappa != 1 && cfg.kappa != -1)
        throw std::invalid_argument("minimize: kappa must be +1 or -1");
    if (!(cfg.m > 0.0) || !std::isfinite(cfg.m))
        throw std::invalid_argument("minimize: mass must be positive");
    if (!(cfg.delta > 0.0 && cfg.delta < 0.5))
        throw std::invalid_argument("minimize: delta must lie in (0, 0.5)");
    if (!(cfg.tol_energy > 0.0) || !(cfg.tol_grad > 0.0) || !(cfg.dt_flow > 0.0))
        throw std::invalid_argument("minimize: tolerances and dt_flow must be positive");
    if (cfg.max_iters == 0) throw std::invalid_argument("minimize: max_iters must be positive");
    if (!std::isfinite(grid->radial.omega))
        throw std::invalid_argument("minimize: flat reference grids carry no trap");
    if (grid->radial.omega != cfg.omega || spec.omega != cfg.omega)
        throw std::invalid_argument("minimize: omega disagrees between config, potential and grid");
    const auto& gp = grid->potential;
    if (gp.variant != spec.variant || gp.omega != spec.omega || gp.m_param != spec.m_param ||
        gp.s_samples != spec.s_samples || gp.u_samples != spec.u_samples)
        throw std::invalid_argument("minimize: potential does not match the one the grid was built with");

    const ProjectionBasis basis = buildProjectionBasis(grid);
    ModeWorkspace ws(grid, basis.Lambda);

    Field3D Q = [&] {
        if (!cfg.warm_start) return threadedStart(grid, basis, cfg.m, cfg.kappa);
        const Field3D& w = *cfg.warm_start;
        if (!w.grid) throw std::invalid_argument("minimize: warm start has no grid");
        validateField(w);
        const Grid3D& g0 = *w.grid;
        if (g0.nS() != grid->nS() || g0.nZ() != grid->nZ() || g0.nTheta() != grid->nTheta() ||
            g0.radial.omega != grid->radial.omega || g0.radial.step != grid->radial.step ||
            g0.z_max != grid->z_max)
            throw std::invalid_argument("minimize: warm start sampled on an incompatible grid");
        Field3D v = Field3D::zeros(grid);
        v.values = w.values;
        return v;
    }();
    renormMass(Q, cfg.m);

    EnergyBreakdown eb = energyMod(Q, cfg.kappa, basis.Lambda);
    double mu = multiplierOf(eb, cfg.omega, cfg.kappa, cfg.m);
    const double delta_cap = cfg.delta * std::sqrt(cfg.omega);
    const auto marginOf = [&](const EnergyBreakdown& b) {
        return delta_cap - std::sqrt(std::max(0.0, b.sz_seminorm2));
    };
    if (marginOf(eb) <= 0.0)
        throw ConstraintActive("minimize: start violates the planar kinetic constraint",
                               marginOf(eb));

    Field3D cand = Field3D::zeros(grid);
    Field3D scratch = Field3D::zeros(grid);
    double dt = cfg.dt_flow;
    const double dt_floor = 1e-6 * cfg.dt_flow;
    const double sqm = std::sqrt(cfg.m);
    int clean = 0;
    std::size_t accepted = 0;
    double el = std::numeric_limits<double>::infinity();
    bool converged = false;

    for (std::size_t trip = 0; trip < cfg.max_iters && !converged; ++trip) {
        // positivity of the shifted operator when the multiplier is negative
        if (mu < 0.0) dt = std::min(dt, 0.45 / -mu);
        cand.values = Q.values;
        kernels::ops().cubic_damp(cand.values.data(), cand.values.size(),
                                  -dt * static_cast<double>(cfg.kappa));
        const double inv_dt = 1.0 / dt;
        for (auto& x : cand.values) x *= inv_dt;
        ws.solveShifted(cand, inv_dt + mu);
        renormMass(cand, cfg.m);
        const EnergyBreakdown ebc = energyMod(cand, cfg.kappa, basis.Lambda);
        if (!(ebc.total <= eb.total + 1e-12 * (std::abs(eb.total) + 1.0))) {
            dt *= 0.5;
            clean = 0;
            if (dt < dt_floor)
                throw StepSizeError("minimize: energy refuses to descend at the step floor", dt);
            continue;
        }
        const double decrease = eb.total - ebc.total;
        std::swap(Q.values, cand.values);
        eb = ebc;
        mu = multiplierOf(eb, cfg.omega, cfg.kappa, cfg.m);
        ++accepted;
        if (++clean >= 3) {
            dt = std::min(dt * 1.5, 0.25);
            clean = 0;
        }
        const double mg = marginOf(eb);
        if (mg <= 0.0)
            throw ConstraintActive("minimize: flow reached the planar kinetic constraint boundary",
                                   mg);
        if (decrease < cfg.tol_energy * (std::abs(eb.total) + 1.0)) {
            el = elResidual(ws, Q, cfg.kappa, mu, scratch);
            if (el < cfg.tol_grad * (1.0 + std::abs(mu)) * sqm) converged = true;
        }
    }
    if (!converged) {
        if (!std::isfinite(el)) el = elResidual(ws, Q, cfg.kappa, mu, scratch);
        throw NoConvergence("minimize: gradient tolerance not met within max_iters", el);
    }

    // orientation: peak of the circle trace at theta = 0, field real positive
    ProjectionResult pr = project(Q, basis);
    rotateTheta(Q, peakAngle(pr.v_par));
    fixGlobalPhase(Q);

    eb = energyMod(Q, cfg.kappa, basis.Lambda);
    mu = multiplierOf(eb, cfg.omega, cfg.kappa, cfg.m);
    el = elResidual(ws, Q, cfg.kappa, mu, scratch);
    pr = project(Q, basis);

    MinimizerResult res;
    res.Q = std::move(Q);
    res.omega = cfg.omega;
    res.m = cfg.m;
    res.kappa = cfg.kappa;
    res.mu = mu;
    res.energy = eb.total;
    res.el_residual = el;
    res.Lambda = basis.Lambda;
    res.iterations = accepted;
    res.diagnostics.sz_seminorm = std::sqrt(std::max(0.0, eb.sz_seminorm2));
    res.diagnostics.theta_seminorm = std::sqrt(eb.theta_seminorm2);
    res.diagnostics.Q_par = std::move(pr.v_par);
    res.diagnostics.perp_mass = massMod(pr.v_perp);
    res.diagnostics.perp_theta_seminorm = std::sqrt(thetaSeminorm2(pr.v_perp));
    res.diagnostics.constraint_margin = delta_cap - res.diagnostics.sz_seminorm;
    return res;
}

ReductionReport dimensionReductionReport(const MinimizerResult& res,
                                         const DnoidalGroundState& gs) {
    if (!res.Q.grid) throw std::invalid_argument("dimensionReductionReport: result has no field");
    if (gs.kappa != res.kappa)
        throw std::invalid_argument("dimensionReductionReport: focusing/defocusing mismatch");
    if (std::abs(gs.m - res.m) > 1e-9 * std::max(1.0, res.m))
        throw std::invalid_argument("dimensionReductionReport: mass mismatch");
    const auto& g = *res.Q.grid;
    const double omega = res.omega;
    const std::size_t ns = g.nS(), nz = g.nZ(), nt = g.nTheta();
    std::vector<double> rs(ns), gz(nz), wt(nt);
    for (std::size_t i = 0; i < ns; ++i) {
        const double s = g.radial.nodes[i];
        rs[i] = cutoffChi(omega, s) * unitGaussian(s);
    }
    for (std::size_t j = 0; j < nz; ++j) gz[j] = unitGaussian(g.z_nodes[j]);
    for (std::size_t k = 0; k < nt; ++k) wt[k] = groundStateValue(gs, g.thetaNode(k));

    Field3D d = res.Q;
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < nz; ++j) {
            const double prof = rs[i] * gz[j];
            cplx* row = d.values.data() + (i * nz + j) * nt;
            for (std::size_t k = 0; k < nt; ++k) row[k] -= prof * wt[k];
        }
    const double m2 = massMod(d);
    const double sz2 = szSeminorm2(d, res.Lambda);
    const double th2 = thetaSeminorm2(d);

    ReductionReport rep;
    rep.sigma_distance = std::sqrt((1.0 + res.Lambda) * m2 + std::max(0.0, sz2) + th2 / omega);
    rep.adprop = omega * res.diagnostics.sz_seminorm * res.diagnostics.sz_seminorm +
                 res.diagnostics.perp_theta_seminorm * res.diagnostics.perp_theta_seminorm;
    rep.energy_gap = std::abs(res.energy - energy1d(sampleGroundState(gs, 4096), gs.kappa));
    return rep;
}

double gnCheck(std::size_t ensemble_size, std::shared_ptr<const Grid3D> grid, double Lambda,
               std::uint64_t seed) {
    if (!grid) throw std::invalid_argument("gnCheck: null grid");
    if (ensemble_size == 0) throw std::invalid_argument("gnCheck: empty ensemble");
    const double omega = grid->radial.omega;
    if (!std::isfinite(omega)) throw std::invalid_argument("gnCheck: needs a trapped grid");

    const std::size_t ns = grid->nS(), nz = grid->nZ(), nt = grid->nTheta();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> width(0.5, 2.0), center(-1.0, 1.0), amp(-1.0, 1.0);
    std::uniform_int_distribution<int> mode(-4, 4);

    constexpr int kBumps = 6;
    std::vector<double> rs(ns), gz(nz);
    std::vector<cplx> tf(nt);
    double best = 0.0;
    Field3D v = Field3D::zeros(grid);
    for (std::size_t e = 0; e < ensemble_size; ++e) {
        std::fill(v.values.begin(), v.values.end(), cplx(0.0, 0.0));
        for (int b = 0; b < kBumps; ++b) {
            const double a = width(rng), sc = center(rng), zc = center(rng);
            const int n = mode(rng);
            const cplx c(amp(rng), amp(rng));
            for (std::size_t i = 0; i < ns; ++i) {
                const double d = grid->radial.nodes[i] - sc;
                rs[i] = std::exp(-0.5 * a * d * d);
            }
            for (std::size_t j = 0; j < nz; ++j) {
                const double d = grid->z_nodes[j] - zc;
                gz[j] = std::exp(-0.5 * a * d * d);
            }
            for (std::size_t k = 0; k < nt; ++k)
                tf[k] = c * std::exp(cplx(0.0, n * grid->thetaNode(k)));
            for (std::size_t i = 0; i < ns; ++i)
                for (std::size_t j = 0; j < nz; ++j) {
                    const double prof = rs[i] * gz[j];
                    cplx* row = v.values.data() + (i * nz + j) * nt;
                    for (std::size_t k = 0; k < nt; ++k) row[k] += prof * tf[k];
                }
        }
        const EnergyBreakdown eb = energyMod(v, 1, Lambda);
        const double m2 = massMod(v);
        const double nv = std::sqrt(m2);
        const double sz2 = std::max(0.0, eb.sz_seminorm2);
        const double th2 = eb.theta_seminorm2;
        const double denom =
            nv * (std::sqrt(omega) * sz2 * std::sqrt(sz2 + th2 / omega) + m2 * std::sqrt(th2) +
                  m2 * nv);
        best = std::max(best, eb.quartic / denom);
    }
    return best;
}

CoercivityReport coercivityCheck(const MinimizerResult& res) {
    if (res.kappa != -1)
        throw std::invalid_argument("coercivityCheck: linearization targets focusing minimizers");
    if (!res.Q.grid) throw std::invalid_argument("coercivityCheck: result has no field");
    const auto grid = res.Q.grid;
    const std::size_t ns = grid->nS(), nz = grid->nZ(), nt = grid->nTheta();
    const auto N = static_cast<Eigen::Index>(grid->points());
    ModeWorkspace ws(grid, res.Lambda);

    // full-point symmetrizing scale: plain dots of scaled vectors are L2(sigma)
    Eigen::VectorXd sc(N), pot(N);
    for (std::size_t i = 0; i < ns; ++i)
        for (std::size_t j = 0; j < nz; ++j) {
            const double w =
                std::sqrt(grid->radial.quad_weights[i] * grid->z_weights[j] * grid->theta_weight);
            for (std::size_t k = 0; k < nt; ++k) {
                const auto p = static_cast<Eigen::Index>((i * nz + j) * nt + k);
                sc[p] = w;
                pot[p] = res.mu - 3.0 * std::norm(res.Q.values[static_cast<std::size_t>(p)]);
            }
        }

    Field3D fa = Field3D::zeros(grid), fb = Field3D::zeros(grid);
    const auto applyRaw = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        for (Eigen::Index p = 0; p < N; ++p)
            fa.values[static_cast<std::size_t>(p)] = cplx(x[p] / sc[p], 0.0);
        ws.applyLin(fa, fb);
        for (Eigen::Index p = 0; p < N; ++p)
            y[p] = std::real(fb.values[static_cast<std::size_t>(p)]) * sc[p] + pot[p] * x[p];
    };

    // deflation directions: the state and its rotation generator
    Eigen::VectorXd b1(N), b2(N);
    for (Eigen::Index p = 0; p < N; ++p)
        b1[p] = std::real(res.Q.values[static_cast<std::size_t>(p)]) * sc[p];
    {
        std::vector<cplx> dq = res.Q.values;
        dft::forwardMany(dq.data(), static_cast<int>(nt), static_cast<int>(ns * nz));
        for (std::size_t r = 0; r < ns * nz; ++r)
            for (std::size_t k = 0; k < nt; ++k)
                dq[r * nt + k] *=
                    cplx(0.0, dft::frequency(static_cast<int>(k), static_cast<int>(nt)));
        dft::inverseMany(dq.data(), static_cast<int>(nt), static_cast<int>(ns * nz));
        for (Eigen::Index p = 0; p < N; ++p)
            b2[p] = std::real(dq[static_cast<std::size_t>(p)]) * sc[p];
    }
    const double nb1 = b1.norm(), nb2 = b2.norm();
    if (!(nb1 > 0.0)) throw std::invalid_argument("coercivityCheck: zero state");

    Eigen::VectorXd tmp(N);
    applyRaw(b1, tmp);
    const double q_form = b1.dot(tmp);
    double kernel_residual = 0.0;
    if (nb2 > 0.0) {
        applyRaw(b2, tmp);
        kernel_residual = tmp.norm() / nb2;
    }

    b1 /= nb1;
    b2 -= b1 * b1.dot(b2);
    const bool have_b2 = b2.norm() > 1e-10 * std::max(nb2, 1e-300);
    if (have_b2) b2.normalize();
    const auto deflate = [&](Eigen::VectorXd& x) {
        x -= b1 * b1.dot(x);
        if (have_b2) x -= b2 * b2.dot(x);
    };
    const auto applyDef = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        applyRaw(x, y);
        deflate(y);
    };
    const double c0_pre = 1.0 + std::max(0.0, res.mu);
    const auto precond = [&](const Eigen::VectorXd& r, Eigen::VectorXd& g) {
        for (Eigen::Index p = 0; p < N; ++p)
            fa.values[static_cast<std::size_t>(p)] = cplx(r[p] / sc[p], 0.0);
        ws.solveShifted(fa, c0_pre);
        for (Eigen::Index p = 0; p < N; ++p)
            g[p] = std::real(fa.values[static_cast<std::size_t>(p)]) * sc[p];
        deflate(g);
    };

    // Rayleigh-quotient descent over span{x, preconditioned residual, previous
    // correction}, the classic three-term recurrence
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd x(N);
    for (Eigen::Index p = 0; p < N; ++p) x[p] = u(rng);
    deflate(x);
    x.normalize();
    Eigen::VectorXd Lx(N), g(N), Lg(N), pv(N), Lpv(N), r(N);
    bool have_p = false;
    applyDef(x, Lx);
    double rho = x.dot(Lx);
    double rn = std::numeric_limits<double>::infinity();
    bool settled = false;
    for (int it = 0; it < 400 && !settled; ++it) {
        rho = x.dot(Lx);
        r = Lx - rho * x;
        rn = r.norm();
        if (rn <= 1e-6 * std::max(1.0, std::abs(rho))) {
            settled = true;
            break;
        }
        precond(r, g);
        g -= x * x.dot(g);
        const double gn = g.norm();
        if (!(gn > 1e-14)) break;
        g /= gn;
        applyDef(g, Lg);
        if (have_p) {
            const double cx = x.dot(pv), cg = g.dot(pv);
            pv -= cx * x + cg * g;
            Lpv -= cx * Lx + cg * Lg;
            const double pn = pv.norm();
            if (pn > 1e-8) {
                pv /= pn;
                Lpv /= pn;
            } else {
                have_p = false;
            }
        }
        const int kdim = have_p ? 3 : 2;
        Eigen::MatrixXd A(kdim, kdim);
        A(0, 0) = x.dot(Lx);
        A(0, 1) = A(1, 0) = x.dot(Lg);
        A(1, 1) = g.dot(Lg);
        if (kdim == 3) {
            A(0, 2) = A(2, 0) = x.dot(Lpv);
            A(1, 2) = A(2, 1) = g.dot(Lpv);
            A(2, 2) = pv.dot(Lpv);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(A);
        const Eigen::VectorXd c = small.eigenvectors().col(0);
        Eigen::VectorXd xn = c[0] * x + c[1] * g;
        Eigen::VectorXd Lxn = c[0] * Lx + c[1] * Lg;
        Eigen::VectorXd pn_ = c[1] * g;
        Eigen::VectorXd Lpn = c[1] * Lg;
        if (kdim == 3) {
            xn += c[2] * pv;
            Lxn += c[2] * Lpv;
            pn_ += c[2] * pv;
            Lpn += c[2] * Lpv;
        }
        const double pnn = pn_.norm();
        have_p = pnn > 1e-12;
        if (have_p) {
            pv = pn_ / pnn;
            Lpv = Lpn / pnn;
        }
        const double xnn = xn.norm();
        x = xn / xnn;
        Lx = Lxn / xnn;
    }
    if (!settled)
        throw NoConvergence("coercivityCheck: deflated eigenvalue iteration did not settle", rn);

    CoercivityReport rep;
    rep.eigenvalue = rho;
    rep.kernel_residual = kernel_residual;
    rep.q_quadratic_form = q_form;
    rep.borderline_mass = std::abs(res.m - kTwoPi * kTwoPi / 2.0) < 0.5;
    return rep;
}

double forbiddenRegionCheck(const MinimizerResult& res, double E_bound) {
    if (!std::isfinite(E_bound)) throw std::invalid_argument("forbiddenRegionCheck: bad bound");
    if (!(res.energy <= E_bound))
        throw std::invalid_argument("forbiddenRegionCheck: minimizer energy exceeds the bound");
    const double sz = res.diagnostics.sz_seminorm, th = res.diagnostics.theta_seminorm;
    return res.omega * sz * sz + th * th;
}

}  // namespace torusgpe
