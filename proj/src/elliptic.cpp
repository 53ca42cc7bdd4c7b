#include "torusgpe/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace torusgpe {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kAgmMaxIter = 64;

} // namespace

EllipticModulus::EllipticModulus(double k) : k_(k) {
    if (!(k > 0.0) || !(k < 1.0)) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "elliptic modulus k=%.17g outside (0,1)", k);
        throw std::invalid_argument(buf);
    }
}

MassTooSmall::MassTooSmall(double m)
    : std::domain_error("mass <= 2*pi^2: dnoidal branch does not exist"), mass(m) {}

CompleteKE completeKE(EllipticModulus km) {
    const double k = km.value();
    double a = 1.0;
    double b = std::sqrt((1.0 - k) * (1.0 + k));
    double sum = 0.5 * k * k;   // 2^{n-1} c_n^2 accumulated, c_0 = k
    double pow2 = 0.5;
    for (int n = 0; n < kAgmMaxIter; ++n) {
        const double c = 0.5 * (a - b);
        if (std::abs(c) <= 1e-17 * a) break;
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
        pow2 *= 2.0;
        sum += pow2 * c * c;
    }
    const double K = kPi / (2.0 * a);
    return {K, K * (1.0 - sum)};
}

double completeK(EllipticModulus k) { return completeKE(k).K; }

double completeE(EllipticModulus k) { return completeKE(k).E; }

JacobiTriple jacobi(double z, EllipticModulus km) {
    const double k = km.value();
    // Descending Landen: run the AGM chain, then unwind the amplitude.
    double a[kAgmMaxIter];
    double c[kAgmMaxIter];
    a[0] = 1.0;
    c[0] = k;
    double b = std::sqrt((1.0 - k) * (1.0 + k));
    int n = 0;
    while (n + 1 < kAgmMaxIter) {
        c[n + 1] = 0.5 * (a[n] - b);
        const double an = 0.5 * (a[n] + b);
        b = std::sqrt(a[n] * b);
        a[n + 1] = an;
        ++n;
        if (std::abs(c[n]) <= 1e-17 * a[n]) break;
    }
    double phi = std::ldexp(a[n], n) * z;
    for (int i = n; i > 0; --i) {
        const double s = std::clamp(c[i] / a[i] * std::sin(phi), -1.0, 1.0);
        phi = 0.5 * (phi + std::asin(s));
    }
    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    const double dn = std::sqrt(1.0 - k * k * sn * sn);
    return {sn, cn, dn};
}

double massOfModulus(EllipticModulus k) {
    const CompleteKE ke = completeKE(k);
    return 8.0 * ke.E * ke.K;
}

EllipticModulus invertMass(double m) {
    const double floor = 2.0 * kPi * kPi;
    if (!(m > floor)) throw MassTooSmall(m);

    double lo = 1e-12;
    double hi = 1.0 - 1e-12;
    if (massOfModulus(EllipticModulus(hi)) < m) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "mass m=%.17g exceeds 8*E*K at k=1-1e-12", m);
        throw std::domain_error(buf);
    }
    // Bisect until the bracket collapses to adjacent doubles; the residual
    // tolerance is then checked, not used as a stopping rule, so quantities
    // derived from k carry full precision.
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * mid; ++it) {
        mid = 0.5 * (lo + hi);
        if (massOfModulus(EllipticModulus(mid)) < m)
            lo = mid;
        else
            hi = mid;
    }
    mid = 0.5 * (lo + hi);
    if (std::abs(massOfModulus(EllipticModulus(mid)) - m) >= 1e-12 * m)
        throw std::runtime_error("invertMass: bisection did not meet residual tolerance");
    return EllipticModulus(mid);
}

} // namespace torusgpe
