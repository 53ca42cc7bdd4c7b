#include "torusgpe/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace torusgpe {

namespace {

void requireOmega(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw std::invalid_argument("omega must be positive and finite");
}

// Local cubic Hermite with second-order difference slopes; reproduces
// polynomials through degree 2 exactly on uniform tables.
double interpolateCubic(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    const int n = static_cast<int>(xs.size());
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    int i = static_cast<int>(it - xs.begin()) - 1;
    i = std::clamp(i, 0, n - 2);

    const double h = xs[i + 1] - xs[i];
    auto slope = [&](int j) {
        if (j <= 0) {
            const double h0 = xs[1] - xs[0], h1 = xs[2] - xs[1];
            // one-sided, second order
            return -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * ys[0] + (h0 + h1) / (h0 * h1) * ys[1] -
                   h0 / (h1 * (h0 + h1)) * ys[2];
        }
        if (j >= n - 1) {
            const double h0 = xs[n - 2] - xs[n - 3], h1 = xs[n - 1] - xs[n - 2];
            return h1 / (h0 * (h0 + h1)) * ys[n - 3] - (h0 + h1) / (h0 * h1) * ys[n - 2] +
                   (h0 + 2.0 * h1) / (h1 * (h0 + h1)) * ys[n - 1];
        }
        const double hl = xs[j] - xs[j - 1], hr = xs[j + 1] - xs[j];
        return (hl * hl * ys[j + 1] - hr * hr * ys[j - 1] + (hr * hr - hl * hl) * ys[j]) /
               (hl * hr * (hl + hr));
    };
    const double t = (x - xs[i]) / h;
    const double m0 = slope(i) * h, m1 = slope(i + 1) * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ys[i] + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * ys[i + 1] +
           (t3 - t2) * m1;
}

} // namespace

PotentialSpec PotentialSpec::quadratic(double omega) {
    requireOmega(omega);
    PotentialSpec p;
    p.variant = PotentialVariant::Quadratic;
    p.omega = omega;
    return p;
}

PotentialSpec PotentialSpec::gaussianRing(double omega, double m_param) {
    requireOmega(omega);
    if (!(m_param > 0.0)) throw std::invalid_argument("GaussianRing m_param must be positive");
    PotentialSpec p;
    p.variant = PotentialVariant::GaussianRing;
    p.omega = omega;
    p.m_param = m_param;
    return p;
}

PotentialSpec PotentialSpec::tabulated(double omega, std::vector<double> s, std::vector<double> u) {
    requireOmega(omega);
    if (s.size() != u.size() || s.size() < 4)
        throw std::invalid_argument("tabulated potential needs >= 4 matching samples");
    for (size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s[i]) || !std::isfinite(u[i]) || u[i] < 0.0)
            throw std::invalid_argument("tabulated potential samples must be finite and >= 0");
        if (i > 0 && s[i] <= s[i - 1])
            throw std::invalid_argument("tabulated s-samples must be strictly increasing");
    }
    PotentialSpec p;
    p.variant = PotentialVariant::Tabulated;
    p.omega = omega;
    p.s_samples = std::move(s);
    p.u_samples = std::move(u);
    return p;
}

double evalU(const PotentialSpec& spec, double s) {
    const double sqw = std::sqrt(spec.omega);
    if (s < -sqw) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "s=%.17g below -sqrt(omega)=%.17g", s, -sqw);
        throw OutOfDomain(buf);
    }
    switch (spec.variant) {
        case PotentialVariant::Quadratic:
            return s * s;
        case PotentialVariant::GaussianRing: {
            const double m = spec.m_param;
            const double x = 1.0 + s / sqw;
            return 0.5 * m * spec.omega *
                   (x * x + m * std::exp((1.0 - x * x) / m) - (m + 1.0));
        }
        case PotentialVariant::Tabulated: {
            if (s < spec.s_samples.front() || s > spec.s_samples.back())
                throw OutOfDomain("s outside the tabulated range; extrapolation is forbidden");
            return interpolateCubic(spec.s_samples, spec.u_samples, s);
        }
    }
    throw std::logic_error("unreachable potential variant");
}

HypothesisReport checkHypotheses(const PotentialSpec& spec, int tol_grid) {
    if (tol_grid < 64) throw std::invalid_argument("tol_grid must be >= 64");
    const double sqw = std::sqrt(spec.omega);

    HypothesisReport r{};
    r.grid_points = tol_grid;
    r.s_lo = -sqw;
    r.s_hi = sqw;
    double devMax = 0.0;
    double cLow = std::numeric_limits<double>::infinity();
    double cHigh = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < tol_grid; ++i) {
        const double s = -sqw + 2.0 * sqw * i / (tol_grid - 1);
        if (std::abs(s) < 1e-12 * sqw) continue;
        const double u = evalU(spec, s);
        const double ratio = u / (s * s);
        devMax = std::max(devMax, std::abs(ratio - 1.0));
        cLow = std::min(cLow, ratio);
        cHigh = std::max(cHigh, ratio);
    }
    r.C1 = sqw * devMax;
    r.c_low = cLow;
    r.c_high = cHigh;
    r.pass = std::isfinite(r.C1) && std::isfinite(cLow) && std::isfinite(cHigh) && cLow > 0.0;
    r.warning = devMax >= 0.5;
    return r;
}

} // namespace torusgpe
