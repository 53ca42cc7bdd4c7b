// Circle ground states, energy, linearized spectrum, split-step evolution.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "torusgpe/circle1d.hpp"
#include "torusgpe/dft.hpp"

using namespace torusgpe;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPiSq = 2.0 * kPi * kPi;

// 30-digit references for the m=30 focusing dnoidal state.
constexpr double kRefK30 = 0.9949344411366983985718;
constexpr double kRefMu30 = 1.393881065554920503648;
constexpr double kRefEnergy30 = -7.222633767151184029148;

double fitSlope(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("branch selection and multipliers") {
    auto border = groundState1d(kTwoPiSq, -1);
    CHECK(border.branch == Branch::Constant);
    CHECK(std::abs(groundStateValue(border, 0.3) - std::sqrt(kPi)) < 1e-14);
    CHECK(std::abs(border.mu_inf - 0.5) < 1e-14);

    auto defoc = groundState1d(7.5, 1);
    CHECK(defoc.branch == Branch::Constant);
    CHECK(std::abs(defoc.mu_inf + 7.5 / (4.0 * kPi * kPi)) < 1e-15);

    auto focSmall = groundState1d(12.0, -1);
    CHECK(focSmall.branch == Branch::Constant);
    CHECK(std::abs(focSmall.mu_inf - 12.0 / (4.0 * kPi * kPi)) < 1e-15);
}

TEST_CASE("dnoidal branch parameters at m=30") {
    auto gs = groundState1d(30.0, -1);
    REQUIRE(gs.branch == Branch::Dnoidal);
    CHECK(std::abs(gs.k - kRefK30) < 1e-12);
    CHECK(std::abs(gs.mu_inf - kRefMu30) < 1e-12);

    const EllipticModulus k(gs.k);
    const double K = completeK(k);
    CHECK(std::abs(4.0 * kPi * gs.alpha * gs.alpha - gs.beta * gs.beta) < 1e-10 * gs.beta * gs.beta);
    CHECK(std::abs(K * gs.beta - kPi) < 1e-10 * kPi);
    CHECK(std::abs(massOfModulus(k) - 30.0) < 1e-10 * 30.0);

    auto w = sampleGroundState(gs, 4096);
    CHECK(std::abs(mass1d(w) - 30.0) < 1e-8 * 30.0);

    // peak sits at theta = 0
    double maxv = 0.0;
    for (auto& v : w.values) maxv = std::max(maxv, std::abs(v));
    CHECK(std::abs(w.values[0].real() - maxv) < 1e-14);
}

TEST_CASE("dnoidal profile satisfies its Euler-Lagrange equation") {
    auto gs = groundState1d(30.0, -1);
    const int n = 4096;
    auto w = sampleGroundState(gs, n);

    // spectral second derivative
    std::vector<std::complex<double>> hat(w.values);
    dft::forward(hat.data(), n);
    for (int s = 0; s < n; ++s) {
        const double l = dft::frequency(s, n);
        hat[s] *= -l * l;
    }
    dft::inverse(hat.data(), n);

    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double q = w.values[i].real();
        const double res = -hat[i].real() - q * q * q / (2.0 * kPi) + gs.mu_inf * q;
        worst = std::max(worst, std::abs(res));
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("energy1d closed forms") {
    CHECK(energy1d(CircleField::zeros(64), -1) == 0.0);

    for (int kappa : {-1, 1}) {
        const double m = 9.0;
        auto gs = groundState1d(m, kappa);
        auto w = sampleGroundState(gs, kappa == 1 ? 64 : 64);
        if (gs.branch == Branch::Constant) {
            CHECK(std::abs(energy1d(w, kappa) - kappa * m * m / (16.0 * kPi * kPi)) < 1e-12);
        }
    }

    auto gs30 = groundState1d(30.0, -1);
    const double e30 = energy1d(sampleGroundState(gs30, 2048), -1);
    CHECK(std::abs(e30 - kRefEnergy30) < 1e-9);
    CHECK(e30 < -900.0 / (16.0 * kPi * kPi));
    CHECK(e30 < 0.0);
}

TEST_CASE("linearized spectrum matches the elliptic-operator eigenvalues") {
    auto gs = groundState1d(30.0, -1);
    auto eigs = linearizedSpectrum1d(gs, 3, 1024);
    const double k2 = gs.k * gs.k;
    const double disc = 2.0 * std::sqrt(k2 * k2 - k2 + 1.0);
    const double b2 = gs.beta * gs.beta;
    const double lam0 = (k2 - 2.0 - disc) / b2;
    const double lam2 = (k2 - 2.0 + disc) / b2;

    CHECK(std::abs(eigs[0].value - lam0) < 1e-6 * std::abs(lam0));
    CHECK(std::abs(eigs[1].value) < 1e-6);
    CHECK(std::abs(eigs[2].value - lam2) < 1e-6 * std::abs(lam2));

    // kernel eigenvector is the profile derivative
    const int n = 1024;
    auto w = sampleGroundState(gs, n);
    std::vector<std::complex<double>> dq(w.values);
    dft::forward(dq.data(), n);
    for (int s = 0; s < n; ++s) dq[s] *= std::complex<double>(0.0, dft::frequency(s, n));
    dft::inverse(dq.data(), n);
    double dot = 0.0, nv = 0.0, nd = 0.0;
    for (int i = 0; i < n; ++i) {
        dot += eigs[1].vector[i] * dq[i].real();
        nv += eigs[1].vector[i] * eigs[1].vector[i];
        nd += dq[i].real() * dq[i].real();
    }
    CHECK(std::abs(dot) / std::sqrt(nv * nd) > 1.0 - 1e-6);
}

TEST_CASE("unrescaled eigenvalues at k=0.5") {
    // mass chosen so the inverted modulus lands on k=0.5
    const double m = massOfModulus(EllipticModulus(0.5));
    REQUIRE(m > kTwoPiSq);
    auto gs = groundState1d(m, -1);
    CHECK(std::abs(gs.k - 0.5) < 1e-10);

    auto eigs = linearizedSpectrum1d(gs, 3, 512);
    const double b2 = gs.beta * gs.beta;
    CHECK(std::abs(eigs[0].value * b2 - (-1.75 - 2.0 * std::sqrt(0.8125))) < 1e-5);
    CHECK(std::abs(eigs[2].value * b2 - (-1.75 + 2.0 * std::sqrt(0.8125))) < 1e-5);
}

TEST_CASE("constant-branch spectrum") {
    auto gs = groundState1d(10.0, -1);
    REQUIRE(gs.branch == Branch::Constant);
    auto eigs = linearizedSpectrum1d(gs, 4, 256);
    CHECK(std::abs(eigs[0].value + 10.0 / kTwoPiSq) < 1e-10);
    CHECK(std::abs(eigs[1].value - (1.0 - 10.0 / kTwoPiSq)) < 1e-10);
    CHECK(std::abs(eigs[2].value - (1.0 - 10.0 / kTwoPiSq)) < 1e-10);
    CHECK(eigs[1].value > 0.0);

    CHECK_THROWS_AS(linearizedSpectrum1d(groundState1d(kTwoPiSq, -1), 3, 256), DegenerateBranch);
}

TEST_CASE("coercivity constant is positive off the borderline") {
    for (double m : {25.0, 30.0, 40.0}) {
        const double c = coercivityConstant1d(groundState1d(m, -1), 512);
        CHECK(c > 0.0);
    }
    // constant branch: complement of the profile span is the mean-zero sector
    const double c = coercivityConstant1d(groundState1d(0.9 * kTwoPiSq, -1), 256);
    CHECK(std::abs(c - 0.1) < 1e-8);
}

TEST_CASE("ground-state optimality under mass-preserving perturbations") {
    auto gs = groundState1d(30.0, -1);
    const int n = 256;
    auto q = sampleGroundState(gs, n);
    const double e0 = energy1d(q, -1);

    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        CircleField w = q;
        for (auto& v : w.values) v += 1e-3 * std::complex<double>(gauss(rng), gauss(rng));
        const double scale = std::sqrt(30.0 / mass1d(w));
        for (auto& v : w.values) v *= scale;
        CHECK(energy1d(w, -1) >= e0 - 1e-10);
    }
}

TEST_CASE("evolve1d zero and plane-wave solutions") {
    auto traj0 = evolve1d(CircleField::zeros(32), -1, 1e-2, 0.1);
    for (auto& v : traj0.back().values) CHECK(std::abs(v) == 0.0);

    for (int kappa : {-1, 1}) {
        const int n = 64, l = 2;
        const double A = 1.3, T = 0.5, dt = 1e-3;
        CircleField w0 = CircleField::zeros(n);
        for (int i = 0; i < n; ++i)
            w0.values[i] = A * std::polar(1.0, l * 2.0 * kPi * i / n);
        auto traj = evolve1d(w0, kappa, dt, T);
        const double omega = l * l + kappa * A * A / (2.0 * kPi);
        double err2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto exact = A * std::polar(1.0, l * 2.0 * kPi * i / n - omega * T);
            err2 += std::norm(traj.back().values[i] - exact);
        }
        CHECK(std::sqrt(2.0 * kPi / n * err2) < 1e-8);
    }
}

TEST_CASE("dnoidal modulus is stationary under evolution") {
    auto gs = groundState1d(30.0, -1);
    const int n = 256;
    auto w0 = sampleGroundState(gs, n);
    auto traj = evolve1d(w0, -1, 2.5e-4, 1.0);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(std::abs(traj.back().values[i]) - w0.values[i].real()));
    CHECK(worst < 1e-6);

    CHECK(std::abs(mass1d(traj.back()) - 30.0) / 30.0 < 1e-9);
}

TEST_CASE("conservation: mass to rounding, energy at second order") {
    auto gs = groundState1d(30.0, -1);
    const int n = 128;
    CircleField w0 = sampleGroundState(gs, n);
    // break stationarity so the energy drift is a genuine splitting error
    for (int i = 0; i < n; ++i)
        w0.values[i] *= 1.0 + 0.05 * std::cos(2.0 * kPi * i / n);

    const double m0 = mass1d(w0);
    const double e0 = energy1d(w0, -1);

    std::vector<double> logdt, logerr;
    for (double dt : {1e-2, 5e-3, 2.5e-3}) {
        auto traj = evolve1d(w0, -1, dt, 1.0);
        CHECK(std::abs(mass1d(traj.back()) - m0) / m0 < 1e-9);
        const double drift = std::abs(energy1d(traj.back(), -1) - e0);
        REQUIRE(drift > 0.0);
        logdt.push_back(std::log(dt));
        logerr.push_back(std::log(drift));
    }
    CHECK(fitSlope(logdt, logerr) >= 1.9);
}
