#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "torusgpe/circle1d.hpp"
#include "torusgpe/core3d.hpp"
#include "torusgpe/dynamics3d.hpp"
#include "torusgpe/minimizer3d.hpp"

using namespace torusgpe;
using cplx = std::complex<double>;

namespace {


std::shared_ptr<const Grid3D> makeGrid(double omega, std::size_t ns, std::size_t nz,
                                       std::size_t nt) {
    return Grid3D::make(RadialGrid::make(omega, ns), PotentialSpec::quadratic(omega), 8.0, nz,
                        nt);
}

Field3D threadCircle(const CircleField& w, const ProjectionBasis& basis) {
    const auto& g = *basis.grid;
    Field3D v = Field3D::zeros(basis.grid);
    for (std::size_t i = 0; i < g.nS(); ++i)
        for (std::size_t j = 0; j < g.nZ(); ++j) {
            const double p = basis.phiTildeAt(i, j);
            for (std::size_t l = 0; l < g.nTheta(); ++l) v.at(i, j, l) = w.values[l] * p;
        }
    return v;
}

double l2sigmaDist(const Field3D& a, const Field3D& b) {
    Field3D d = a;
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
    return std::sqrt(massMod(d));
}

EvolveConfig baseConfig(double omega, double Lambda) {
    EvolveConfig ec;
    ec.dt = 1e-2 / omega;
    ec.T = 100 * ec.dt;
    ec.omega = omega;
    ec.kappa = -1;
    ec.Lambda = Lambda;
    ec.record_every = 25;
    return ec;
}

}  // namespace

TEST_CASE("evolve3d: separable ground product only picks up a pointwise phase") {
    const double omega = 64.0;
    auto g = makeGrid(omega, 128, 129, 16);
    const auto basis = buildProjectionBasis(g);
    Field3D v0 = Field3D::zeros(g);
    const double eps = 1e-3;
    for (std::size_t i = 0; i < g->nS(); ++i)
        for (std::size_t j = 0; j < g->nZ(); ++j)
            for (std::size_t l = 0; l < g->nTheta(); ++l)
                v0.at(i, j, l) = eps * basis.phiAt(i, j);

    auto ec = baseConfig(omega, basis.Lambda);
    const auto tr = evolve3d(v0, ec);

    // the product profile spans the kernel of the linear factor, so the flow
    // reduces to the exact cubic phase and the modulus is frozen
    double dev = 0.0;
    for (std::size_t i = 0; i < v0.values.size(); ++i)
        dev = std::max(dev,
                       std::abs(std::abs(tr.v_final.values[i]) - std::abs(v0.values[i])));
    CHECK(dev < 1e-11);

    const double m0 = tr.mass_series.front();
    for (const double m : tr.mass_series)
        CHECK(std::abs(m - m0) <= 1e-12 * std::max(m0, 1e-12));
    CHECK(tr.remainder_series.front() < 1e-12);
    CHECK(tr.h3_initial < 1e-15);
}

TEST_CASE("evolve3d: zero data stays zero") {
    const double omega = 64.0;
    auto g = makeGrid(omega, 128, 129, 16);
    const auto basis = buildProjectionBasis(g);
    auto ec = baseConfig(omega, basis.Lambda);
    ec.T = 10 * ec.dt;
    ec.record_every = 5;
    const auto tr = evolve3d(Field3D::zeros(g), ec);
    CHECK(tr.times.size() == 3);
    for (const double m : tr.mass_series) CHECK(m == 0.0);
    for (const double r : tr.remainder_series) CHECK(r == 0.0);
    for (const auto& v : tr.v_final.values) CHECK(v == cplx(0.0));
}

TEST_CASE("evolve3d: mass exact, energy drift second order, records on cadence") {
    const double omega = 64.0;
    auto g = makeGrid(omega, 128, 129, 16);
    const auto basis = buildProjectionBasis(g);
    const auto gs = groundState1d(30.0, -1);
    const CircleField w0 = sampleGroundState(gs, static_cast<int>(g->nTheta()));
    const Field3D v0 = threadCircle(w0, basis);

    const double T = 0.04;
    std::vector<double> drifts;
    for (int k = 0; k < 2; ++k) {
        EvolveConfig ec;
        ec.dt = 1e-2 / omega / (1 << k);
        ec.T = T;
        ec.omega = omega;
        ec.kappa = -1;
        ec.Lambda = basis.Lambda;
        ec.record_every = 1u << 30;  // initial and final only
        const auto tr = evolve3d(v0, ec);

        CHECK(tr.times.size() == 2);
        CHECK(tr.times.back() == doctest::Approx(T).epsilon(1e-12));
        const double m0 = tr.mass_series.front();
        CHECK(std::abs(tr.mass_series.back() - m0) <= 1e-12 * m0);
        drifts.push_back(std::abs(tr.energy_series.back() - tr.energy_series.front()));

        // the parallel snapshot at t=0 is w0 itself: the threading profile has
        // unit discrete norm
        for (std::size_t l = 0; l < w0.values.size(); ++l)
            CHECK(std::abs(tr.v_par_snapshots.front().values[l] - w0.values[l]) < 1e-12);
        // remainder is sqrt(mass - mass1d): cancellation of two ~30 sums over
        // 264k terms leaves a ~3e-7 floor, well below the dynamic values
        CHECK(tr.remainder_series.front() < 1e-6);
    }
    CHECK(drifts[0] < 1e-5);
    const double order = std::log2(drifts[0] / drifts[1]);
    CHECK(order > 1.9);

    // cadence: n = 10 steps, every 3rd recorded plus both ends
    EvolveConfig ec;
    ec.dt = 1e-2 / omega;
    ec.T = 10 * ec.dt;
    ec.omega = omega;
    ec.kappa = -1;
    ec.Lambda = basis.Lambda;
    ec.record_every = 3;
    const auto tr = evolve3d(v0, ec);
    REQUIRE(tr.times.size() == 5);
    const double h = ec.dt;
    const double expected[] = {0.0, 3 * h, 6 * h, 9 * h, 10 * h};
    for (std::size_t r = 0; r < 5; ++r)
        CHECK(tr.times[r] == doctest::Approx(expected[r]).epsilon(1e-13));
    CHECK(tr.v_par_snapshots.size() == 5);
    CHECK(tr.v_par_snapshots.back().size() == static_cast<int>(g->nTheta()));
}

TEST_CASE("evolve3d: reversing the step returns the initial data") {
    const double omega = 64.0;
    auto g = makeGrid(omega, 128, 129, 16);
    const auto basis = buildProjectionBasis(g);
    const auto gs = groundState1d(30.0, -1);
    const Field3D v0 = threadCircle(sampleGroundState(gs, static_cast<int>(g->nTheta())), basis);

    auto ec = baseConfig(omega, basis.Lambda);
    const auto fwd = evolve3d(v0, ec);
    EvolveConfig eb = ec;
    eb.dt = -ec.dt;
    const auto back = evolve3d(fwd.v_final, eb);

    CHECK(back.times.back() == doctest::Approx(-ec.T).epsilon(1e-12));
    CHECK(l2sigmaDist(back.v_final, v0) < 1e-10);
}

TEST_CASE("evolve3d: minimized profile is stationary in modulus") {
    const double omega = 64.0;
    auto g = makeGrid(omega, 128, 129, 16);
    MinimizeConfig mc;
    mc.omega = omega;
    mc.m = 30.0;
    mc.kappa = -1;
    const auto res = minimize(mc, PotentialSpec::quadratic(omega), g);

    EvolveConfig ec;
    ec.dt = 1e-2 / omega;
    ec.T = 10.0 / omega;  // ten sweeps of the slowest linear phase scale
    ec.omega = omega;
    ec.kappa = -1;
    ec.Lambda = res.Lambda;
    ec.record_every = 250;
    const auto tr = evolve3d(res.Q, ec);

    Field3D dm = res.Q;
    for (std::size_t i = 0; i < dm.values.size(); ++i)
        dm.values[i] = std::abs(tr.v_final.values[i]) - std::abs(res.Q.values[i]);
    const double rel = std::sqrt(massMod(dm) / res.m);
    CHECK(rel < 1e-5);

    // the state rotates coherently at the chemical-potential rate
    cplx overlap(0.0);
    const auto& grid = *g;
    for (std::size_t i = 0; i < grid.nS(); ++i)
        for (std::size_t j = 0; j < grid.nZ(); ++j) {
            const double w = grid.radial.quad_weights[i] * grid.z_weights[j];
            for (std::size_t l = 0; l < grid.nTheta(); ++l)
                overlap += w * tr.v_final.at(i, j, l) * std::conj(res.Q.at(i, j, l));
        }
    overlap *= grid.theta_weight;
    CHECK(std::abs(overlap) / res.m > 1.0 - 1e-8);
    const double phase = std::arg(overlap);
    CHECK(phase == doctest::Approx(res.mu * ec.T).epsilon(2e-4));
}

TEST_CASE("checkH3: threaded data sits in the tube, excited data does not") {
    const double omega = 64.0;
    auto g = makeGrid(omega, 128, 129, 16);
    const auto basis = buildProjectionBasis(g);
    const auto gs = groundState1d(30.0, -1);
    const Field3D v0 = threadCircle(sampleGroundState(gs, static_cast<int>(g->nTheta())), basis);

    const auto ok = checkH3(v0, 0.05, basis.Lambda);
    CHECK(ok.pass);
    CHECK(ok.value < 1e-8);

    Field3D excited = v0;
    for (std::size_t i = 0; i < g->nS(); ++i) {
        const double s = g->radial.nodes[i];
        const double f = 1.0 + 0.5 * std::sin(s);
        for (std::size_t j = 0; j < g->nZ(); ++j)
            for (std::size_t l = 0; l < g->nTheta(); ++l) excited.at(i, j, l) *= f;
    }
    const auto bad = checkH3(excited, 1e-4, basis.Lambda);
    CHECK(bad.value > 1.0);
    CHECK_FALSE(bad.pass);

    const auto zero = checkH3(Field3D::zeros(g), 0.05, basis.Lambda);
    CHECK(zero.pass);
    CHECK(zero.value == 0.0);

    CHECK_THROWS_AS(checkH3(v0, 0.0, basis.Lambda), std::invalid_argument);
}

TEST_CASE("evolve3d: config validation") {
    const double omega = 64.0;
    auto g = makeGrid(omega, 128, 129, 16);
    const auto basis = buildProjectionBasis(g);
    const auto gs = groundState1d(30.0, -1);
    const Field3D v0 = threadCircle(sampleGroundState(gs, static_cast<int>(g->nTheta())), basis);

    auto ec = baseConfig(omega, basis.Lambda);
    CHECK_NOTHROW(evolve3d(v0, [&] {
        auto c = ec;
        c.T = 2 * c.dt;
        return c;
    }()));

    auto bad = ec;
    bad.dt = 0.0;
    CHECK_THROWS_AS(evolve3d(v0, bad), std::invalid_argument);
    bad = ec;
    bad.dt = 1.5e-2 / omega;
    CHECK_THROWS_AS(evolve3d(v0, bad), std::invalid_argument);
    bad = ec;
    bad.T = 0.5 * ec.dt;
    CHECK_THROWS_AS(evolve3d(v0, bad), std::invalid_argument);
    bad = ec;
    bad.record_every = 0;
    CHECK_THROWS_AS(evolve3d(v0, bad), std::invalid_argument);
    bad = ec;
    bad.kappa = 0;
    CHECK_THROWS_AS(evolve3d(v0, bad), std::invalid_argument);
    bad = ec;
    bad.omega = 2.0 * omega;
    CHECK_THROWS_AS(evolve3d(v0, bad), std::invalid_argument);
    bad = ec;
    bad.Lambda = basis.Lambda + 1e-3;
    CHECK_THROWS_AS(evolve3d(v0, bad), std::invalid_argument);
}

TEST_CASE("reductionHarness: cheap triple shrinks toward the circle flow") {
    const auto gs = groundState1d(30.0, -1);
    const CircleField w0 = sampleGroundState(gs, 16);
    HarnessConfig hc;
    hc.T = 0.25;
    // omega = 16 would put the profile cutoff inside the bulk of the radial
    // ground state and trip the tube admission check; start at 32
    const auto rep = reductionHarness(w0, {32.0, 64.0, 128.0}, hc);

    REQUIRE(rep.remainder.values.size() == 3);
    REQUIRE(rep.trajectory.values.size() == 3);
    CHECK(rep.remainder.metric_name == "sup_remainder_l2sigma");
    CHECK(rep.trajectory.metric_name == "trajectory_distance_l2circle");
    for (const double v : rep.remainder.values) CHECK(v > 0.0);
    for (const double v : rep.trajectory.values) CHECK(v > 0.0);
    CHECK(rep.remainder.values[1] < rep.remainder.values[0]);
    CHECK(rep.remainder.values[2] < rep.remainder.values[1]);
    CHECK(rep.remainder.fitted_rate < 0.0);
}

TEST_CASE("reductionHarness: argument validation") {
    const auto gs = groundState1d(30.0, -1);
    const CircleField w0 = sampleGroundState(gs, 16);
    HarnessConfig hc;

    CHECK_THROWS_AS(reductionHarness(w0, {16.0, 32.0}, hc), std::invalid_argument);
    CHECK_THROWS_AS(reductionHarness(w0, {32.0, 16.0, 64.0}, hc), std::invalid_argument);
    auto bad = hc;
    bad.n_theta = 32;  // w0 lives on 16 nodes
    CHECK_THROWS_AS(reductionHarness(w0, {16.0, 32.0, 64.0}, bad), std::invalid_argument);
    bad = hc;
    bad.dt_scale = 2e-2;
    CHECK_THROWS_AS(reductionHarness(w0, {16.0, 32.0, 64.0}, bad), std::invalid_argument);
    bad = hc;
    bad.samples = 0;
    CHECK_THROWS_AS(reductionHarness(w0, {16.0, 32.0, 64.0}, bad), std::invalid_argument);
    bad = hc;
    bad.kappa = 3;
    CHECK_THROWS_AS(reductionHarness(w0, {16.0, 32.0, 64.0}, bad), std::invalid_argument);
    bad = hc;
    bad.T = 0.0;
    CHECK_THROWS_AS(reductionHarness(w0, {16.0, 32.0, 64.0}, bad), std::invalid_argument);
}
