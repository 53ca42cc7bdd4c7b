#include "torusgpe/transverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symtridiag.hpp"

namespace torusgpe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using detail::EigenPair1d;
using detail::SymTridiag;

double defaultSMax(double omega) { return std::max(8.0, std::min(std::sqrt(omega), 12.0)); }

std::vector<EigenPair1d> lowestPairs(const SymTridiag& t, const RadialGrid& grid, int k) {
    // Hermite envelopes seed the iteration near the oscillator ladder.
    std::vector<std::vector<double>> starts;
    for (int j = 0; j < k; ++j) {
        std::vector<double> start(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double s = grid.nodes[i];
            double q = 1.0;
            if (j == 1) q = s;
            if (j == 2) q = s * s - 0.5;
            if (j == 3) q = s * (s * s - 1.5);
            start[i] = q * std::exp(-0.5 * s * s) * std::sqrt(grid.quad_weights[i]);
        }
        starts.push_back(std::move(start));
    }
    return detail::lowestPairs(t, starts, 0.5, 2048);
}

SymTridiag symmetrize(const RadialGrid& grid, const TridiagOperator& h) {
    return detail::symmetrized(h, grid.quad_weights);
}

// centered interior, one-sided ends
std::vector<double> gridDerivative(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> d(n);
    d[0] = (f[1] - f[0]) / h;
    d[n - 1] = (f[n - 1] - f[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    return d;
}

}  // namespace

RadialGrid RadialGrid::make(double omega, std::size_t n_s, double s_max) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw std::invalid_argument("radial grid needs a positive finite omega");
    if (n_s < 8) throw std::invalid_argument("radial grid needs at least 8 nodes");
    const double sq = std::sqrt(omega);
    const double smax_def = defaultSMax(omega);
    if (s_max == 0.0) s_max = smax_def;
    if (s_max < smax_def)
        throw std::invalid_argument("s_max below max(8, min(sqrt(omega), 12))");
    RadialGrid g;
    g.omega = omega;
    g.s_min = -sq;
    g.s_max = s_max;
    g.step = (s_max - g.s_min) / static_cast<double>(n_s);
    g.nodes.resize(n_s);
    g.sigma.resize(n_s);
    g.quad_weights.resize(n_s);
    for (std::size_t i = 0; i < n_s; ++i) {
        g.nodes[i] = g.s_min + g.step * static_cast<double>(i);
        g.sigma[i] = 1.0 + g.nodes[i] / sq;
        g.quad_weights[i] = g.step * g.sigma[i];
    }
    g.quad_weights[0] = g.step * g.step / (8.0 * sq);
    return g;
}

RadialGrid RadialGrid::reference(double s_half, std::size_t n_s) {
    if (!(s_half >= 8.0)) throw std::invalid_argument("reference grid needs s_half >= 8");
    if (n_s < 8) throw std::invalid_argument("radial grid needs at least 8 nodes");
    RadialGrid g;
    g.omega = kInf;
    g.s_min = -s_half;
    g.s_max = s_half;
    g.step = 2.0 * s_half / static_cast<double>(n_s);
    g.nodes.resize(n_s);
    g.sigma.assign(n_s, 1.0);
    g.quad_weights.assign(n_s, g.step);
    for (std::size_t i = 0; i < n_s; ++i) g.nodes[i] = g.s_min + g.step * static_cast<double>(i);
    g.quad_weights[0] = 0.5 * g.step;
    return g;
}

double RadialGrid::sigmaAt(double s) const {
    return std::isinf(omega) ? 1.0 : 1.0 + s / std::sqrt(omega);
}

std::vector<double> TridiagOperator::apply(const std::vector<double>& u) const {
    const std::size_t n = diag.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * u[i];
        if (i > 0) v += sub[i - 1] * u[i - 1];
        if (i + 1 < n) v += sup[i] * u[i + 1];
        out[i] = v;
    }
    return out;
}

TridiagOperator assembleH1d(const RadialGrid& grid, const PotentialSpec& spec) {
    const std::size_t n = grid.size();
    if (n < 128) throw GridTooCoarse("radial operator needs N_s >= 128");
    if (!std::isinf(grid.omega) && spec.omega != grid.omega)
        throw std::invalid_argument("grid and potential disagree on omega");
    const double h = grid.step;
    TridiagOperator op;
    op.diag.resize(n);
    op.sub.resize(n - 1);
    op.sup.resize(n - 1);
    double sigL = 0.0;  // flux at s_min vanishes with the weight
    for (std::size_t i = 0; i < n; ++i) {
        const double sigR = grid.sigmaAt(grid.nodes[i] + 0.5 * h);
        const double w = grid.quad_weights[i];
        const double tl = sigL / (h * w);
        const double tr = sigR / (h * w);
        op.diag[i] = tl + tr + evalU(spec, grid.nodes[i]);
        if (i + 1 < n) {
            op.sup[i] = -sigR / (h * w);
            op.sub[i] = -sigR / (h * grid.quad_weights[i + 1]);
        }
        sigL = sigR;
    }
    return op;
}

TransverseEigenResult solveTransverse(const RadialGrid& grid, const PotentialSpec& spec,
                                      int n_eigs) {
    if (n_eigs < 2 || n_eigs > 4)
        throw std::invalid_argument("n_eigs must lie in [2, 4]");
    const auto op = assembleH1d(grid, spec);
    const auto t = symmetrize(grid, op);
    auto pairs = lowestPairs(t, grid, n_eigs);

    auto& ground = pairs[0];
    std::vector<double> y = ground.vec;
    if (!detail::reconstructTails(t, ground.value, y)) y = ground.vec;

    const std::size_t n = grid.size();
    TransverseEigenResult r;
    r.lambda = ground.value;
    r.lambda_prime = pairs[1].value;
    for (int j = 2; j < n_eigs; ++j) r.higher.push_back(pairs[j].value);
    r.phi.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.phi[i] = y[i] / std::sqrt(grid.quad_weights[i]);
    double m2 = 0.0;
    std::size_t ip = 0;
    for (std::size_t i = 0; i < n; ++i) {
        m2 += grid.quad_weights[i] * r.phi[i] * r.phi[i];
        if (std::abs(r.phi[i]) > std::abs(r.phi[ip])) ip = i;
    }
    const double scale = ((r.phi[ip] < 0.0) ? -1.0 : 1.0) / std::sqrt(m2);
    for (auto& v : r.phi) v *= scale;

    const auto hphi = op.apply(r.phi);
    double res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ri = hphi[i] - r.lambda * r.phi[i];
        res2 += grid.quad_weights[i] * ri * ri;
    }
    r.residual = std::sqrt(res2);
    if (r.residual > 1e-9) {
        // the matched-recurrence vector is only kept when it is at least as
        // good as the iteration vector
        r.phi.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            r.phi[i] = ground.vec[i] / std::sqrt(grid.quad_weights[i]);
        m2 = 0.0;
        ip = 0;
        for (std::size_t i = 0; i < n; ++i) {
            m2 += grid.quad_weights[i] * r.phi[i] * r.phi[i];
            if (std::abs(r.phi[i]) > std::abs(r.phi[ip])) ip = i;
        }
        const double sc = ((r.phi[ip] < 0.0) ? -1.0 : 1.0) / std::sqrt(m2);
        for (auto& v : r.phi) v *= sc;
        const auto hp = op.apply(r.phi);
        res2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ri = hp[i] - r.lambda * r.phi[i];
            res2 += grid.quad_weights[i] * ri * ri;
        }
        r.residual = std::sqrt(res2);
    }
    r.Lambda = r.lambda + 1.0;
    r.Lambda_prime = std::min(r.lambda_prime + 1.0, r.lambda + 3.0);
    return r;
}

ConvergenceMetrics groundStateConvergence(const RadialGrid& grid,
                                          const TransverseEigenResult& result) {
    const std::size_t n = grid.size();
    const double h = grid.step;
    const auto dphi = gridDerivative(result.phi, h);
    ConvergenceMetrics m{0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        const double s = grid.nodes[i];
        const double tw = (i == 0 || i + 1 == n) ? 0.5 * h : h;
        const double d = result.phi[i] - unitGaussian(s);
        const double dd = dphi[i] - (-s * unitGaussian(s));
        m.l2_err += tw * d * d;
        m.grad_err += tw * dd * dd;
        m.weighted_err += tw * s * s * d * d;
        m.l4_err += tw * d * d * d * d;
    }
    return m;
}

double decayCheck(const RadialGrid& grid, const TransverseEigenResult& result, double c) {
    if (!(c > 0.0 && c < 0.45))
        throw std::invalid_argument("decay rate must lie in (0, 0.45)");
    const auto dphi = gridDerivative(result.phi, grid.step);
    double best = -kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = result.phi[i] + std::abs(dphi[i]);
        if (a <= 0.0) continue;
        const double s = grid.nodes[i];
        best = std::max(best, std::log(a) + c * s * s);
    }
    return best == -kInf ? 0.0 : std::exp(best);
}

double cutoffProfile(double x) {
    if (x <= 1.0) return 0.0;
    if (x >= 2.0) return 1.0;
    const double t = x - 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double cutoffChi(double omega, double s) { return cutoffProfile(s + std::sqrt(omega)); }

double unitGaussian(double x) {
    static const double norm = std::pow(std::acos(-1.0), -0.25);
    return norm * std::exp(-0.5 * x * x);
}

}  // namespace torusgpe
