#pragma once

// Internal symmetric-tridiagonal eigen machinery shared by the transverse
// solver and the axial ground-state solve. Not installed.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "torusgpe/transverse.hpp"

namespace torusgpe::detail {

constexpr double kTridiagEps = std::numeric_limits<double>::epsilon();

// Symmetrized form W^{1/2} H W^{-1/2}: same diagonal, off-diagonal
// -sigma_{i+1/2} / (h sqrt(w_i w_{i+1})).
struct SymTridiag {
    std::vector<double> d;
    std::vector<double> e;  // size n-1
    std::size_t size() const { return d.size(); }

    void apply(const std::vector<double>& x, std::vector<double>& out) const {
        const std::size_t n = d.size();
        for (std::size_t i = 0; i < n; ++i) {
            double v = d[i] * x[i];
            if (i > 0) v += e[i - 1] * x[i - 1];
            if (i + 1 < n) v += e[i] * x[i + 1];
            out[i] = v;
        }
    }

    double rowNormInf() const {
        double m = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            double r = std::abs(d[i]);
            if (i > 0) r += std::abs(e[i - 1]);
            if (i + 1 < d.size()) r += std::abs(e[i]);
            m = std::max(m, r);
        }
        return m;
    }
};

// Tridiagonal LU with partial pivoting (the shifted matrix is indefinite).
struct TridiagLU {
    std::vector<double> dl, d, du, du2;
    std::vector<int> piv;

    void factor(const SymTridiag& t, double shift) {
        const std::size_t n = t.size();
        d.resize(n);
        dl.assign(n > 1 ? n - 1 : 0, 0.0);
        du.assign(n > 1 ? n - 1 : 0, 0.0);
        du2.assign(n > 2 ? n - 2 : 0, 0.0);
        piv.assign(n > 1 ? n - 1 : 0, 0);
        for (std::size_t i = 0; i < n; ++i) d[i] = t.d[i] - shift;
        for (std::size_t i = 0; i + 1 < n; ++i) dl[i] = du[i] = t.e[i];
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                const double fact = (d[i] != 0.0) ? dl[i] / d[i] : 0.0;
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
                if (i + 2 < n) du2[i] = 0.0;
                piv[i] = 0;
            } else {
                const double fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const double tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                piv[i] = 1;
            }
        }
        // a shift landing on an eigenvalue is fine for inverse iteration;
        // clamp the pivot instead of failing
        const double tiny = kTridiagEps * (t.rowNormInf() + std::abs(shift));
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(d[i]) < tiny) d[i] = (d[i] < 0.0) ? -tiny : tiny;
    }

    void solve(std::vector<double>& b) const {
        const std::size_t n = d.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (piv[i] == 0) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const double tmp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tmp - dl[i] * b[i + 1];
            }
        }
        b[n - 1] /= d[n - 1];
        if (n >= 2) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (std::size_t k = n; k-- > 2;) {
            const std::size_t i = k - 2;
            b[i] = (b[i] - du[i] * b[i + 1] - (i + 2 < n ? du2[i] * b[i + 2] : 0.0)) / d[i];
        }
    }
};

inline double dotv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2v(const std::vector<double>& a) { return std::sqrt(dotv(a, a)); }

inline void deflate(std::vector<double>& x, const std::vector<std::vector<double>>& locked) {
    for (const auto& v : locked) {
        const double c = dotv(x, v);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * v[i];
    }
}

struct EigenPair1d {
    double value;
    std::vector<double> vec;
};

// Shift-invert iteration with deflation; Rayleigh updates after the first
// two steps. Throws NoConvergence past the iteration cap.
inline EigenPair1d lowestDeflated(const SymTridiag& t, const std::vector<double>& start,
                                  const std::vector<std::vector<double>>& locked, double shift0) {
    const std::size_t n = t.size();
    std::vector<double> y = start, ty(n);
    deflate(y, locked);
    double ny = norm2v(y);
    if (!(ny > 0.0)) {
        y.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) y[i] = (i % 3 == 0) ? 1.0 : -0.5;
        deflate(y, locked);
        ny = norm2v(y);
    }
    for (auto& v : y) v /= ny;

    // stopping level sits just above the eps*||T|| rounding floor of the
    // residual itself
    const double tol = std::max(1e-13, 4.0 * kTridiagEps * t.rowNormInf());
    TridiagLU lu;
    double mu = shift0;
    bool needFactor = true;
    double res = std::numeric_limits<double>::infinity(), theta = 0.0;
    for (int it = 0; it < 300; ++it) {
        if (needFactor) {
            lu.factor(t, mu);
            needFactor = false;
        }
        lu.solve(y);
        deflate(y, locked);
        ny = norm2v(y);
        if (!(ny > 0.0) || !std::isfinite(ny)) throw NoConvergence("eigen iteration broke down", res);
        for (auto& v : y) v /= ny;
        t.apply(y, ty);
        theta = dotv(y, ty);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ri = ty[i] - theta * y[i];
            r2 += ri * ri;
        }
        res = std::sqrt(r2);
        if (res <= tol * std::max(1.0, std::abs(theta))) return {theta, y};
        if (it >= 2 && std::abs(theta - mu) > tol) {
            mu = theta;
            needFactor = true;
        }
    }
    throw NoConvergence("tridiagonal eigensolve did not converge", res);
}

// Componentwise tail reconstruction: integrate the three-term recurrence
// from both edges toward the peak (the growing, hence stable, direction)
// and match there. Gives relative accuracy down to underflow, which the
// iteration vector cannot (its tail floor is eps * ||y||).
inline bool reconstructTails(const SymTridiag& t, double theta, std::vector<double>& y) {
    const std::size_t n = t.size();
    std::size_t ip = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(y[i]) > std::abs(y[ip])) ip = i;
    if (ip == 0 || ip + 1 == n) return false;

    std::vector<double> left(ip + 1), right(n - ip);
    left[0] = 1.0;
    left[1] = (theta - t.d[0]) * left[0] / t.e[0];
    for (std::size_t i = 1; i < ip; ++i) {
        left[i + 1] = ((theta - t.d[i]) * left[i] - t.e[i - 1] * left[i - 1]) / t.e[i];
        if (std::abs(left[i + 1]) > 1e280)
            for (std::size_t j = 0; j <= i + 1; ++j) left[j] *= 1e-280;
    }
    right[n - 1 - ip] = 1.0;
    right[n - 2 - ip] = (theta - t.d[n - 1]) * 1.0 / t.e[n - 2];
    for (std::size_t i = n - 2; i > ip; --i) {
        right[i - 1 - ip] =
            ((theta - t.d[i]) * right[i - ip] - t.e[i] * right[i + 1 - ip]) / t.e[i - 1];
        if (std::abs(right[i - 1 - ip]) > 1e280)
            for (std::size_t j = i - 1 - ip; j < right.size(); ++j) right[j] *= 1e-280;
    }
    const double lp = left[ip], rp = right[0];
    if (!(std::isfinite(lp) && std::isfinite(rp)) || lp == 0.0 || rp == 0.0) return false;
    std::vector<double> out(n);
    for (std::size_t i = 0; i <= ip; ++i) out[i] = left[i] / lp;
    for (std::size_t i = ip; i < n; ++i) out[i] = right[i - ip] / rp;
    double nn = norm2v(out);
    if (!(nn > 0.0) || !std::isfinite(nn)) return false;
    const double sgn = (y[ip] >= 0.0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) out[i] = sgn * out[i] / nn;
    y = std::move(out);
    return true;
}

inline std::vector<EigenPair1d> lowestPairsDense(const SymTridiag& t, int k) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = t.d[i];
        if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = t.e[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    std::vector<EigenPair1d> out;
    for (int j = 0; j < k; ++j) {
        EigenPair1d p;
        p.value = es.eigenvalues()(j);
        p.vec.resize(t.size());
        for (Eigen::Index i = 0; i < n; ++i) p.vec[i] = es.eigenvectors()(i, j);
        out.push_back(std::move(p));
    }
    return out;
}

// One start vector per wanted pair. Falls back to the dense path for
// matrices up to dense_cap when the iteration stalls.
inline std::vector<EigenPair1d> lowestPairs(const SymTridiag& t,
                                            const std::vector<std::vector<double>>& starts,
                                            double shift0, std::size_t dense_cap) {
    std::vector<EigenPair1d> pairs;
    std::vector<std::vector<double>> locked;
    try {
        for (const auto& start : starts) {
            auto p = lowestDeflated(t, start, locked, shift0);
            locked.push_back(p.vec);
            pairs.push_back(std::move(p));
        }
    } catch (const NoConvergence&) {
        if (t.size() <= dense_cap) return lowestPairsDense(t, static_cast<int>(starts.size()));
        throw;
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const EigenPair1d& a, const EigenPair1d& b) { return a.value < b.value; });
    return pairs;
}

// flux-form operator rescaled to sqrt-weight coordinates, where it is
// symmetric with the plain dot product
inline SymTridiag symmetrized(const TridiagOperator& h, const std::vector<double>& w) {
    SymTridiag t;
    const std::size_t n = h.diag.size();
    t.d = h.diag;
    t.e.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) t.e[i] = h.sup[i] * std::sqrt(w[i] / w[i + 1]);
    return t;
}

// axial operator: zero-flux closure at both ends, potential z^2, already in
// sqrt-weight coordinates
inline SymTridiag assembleAxialTridiag(const std::vector<double>& z,
                                       const std::vector<double>& wz, double hz) {
    const std::size_t n = z.size();
    SymTridiag t;
    t.d.resize(n);
    t.e.resize(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double fluxes = ((j > 0) ? 1.0 : 0.0) + ((j + 1 < n) ? 1.0 : 0.0);
        t.d[j] = fluxes / (hz * wz[j]) + z[j] * z[j];
    }
    for (std::size_t j = 0; j + 1 < n; ++j) t.e[j] = -1.0 / (hz * std::sqrt(wz[j] * wz[j + 1]));
    return t;
}

}  // namespace torusgpe::detail
