#include "torusgpe/circle1d.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "torusgpe/dft.hpp"

namespace torusgpe {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool isPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

void requireGrid(int n) {
    if (!isPowerOfTwo(n) || n < 8)
        throw std::invalid_argument("angular grid size must be a power of two, >= 8");
}

// Dense symmetric discretization of the linearized operator
// -d^2/dtheta^2 + mu + (3 kappa / 2pi) Q^2 on real perturbations.
Eigen::MatrixXd assembleLinearized(const DnoidalGroundState& gs, int n) {
    // circulant kernel of the spectral second derivative
    std::vector<std::complex<double>> kern(n);
    for (int s = 0; s < n; ++s) {
        const double l = dft::frequency(s, n);
        kern[s] = l * l;
    }
    dft::inverse(kern.data(), n);

    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = kern[(i - j + n) % n].real();

    for (int i = 0; i < n; ++i) {
        const double theta = 2.0 * kPi * i / n;
        const double q = groundStateValue(gs, theta);
        A(i, i) += gs.mu_inf + 3.0 * gs.kappa / (2.0 * kPi) * q * q;
    }
    return 0.5 * (A + A.transpose());
}

} // namespace

CircleField CircleField::zeros(int n_theta) {
    CircleField w;
    w.values.assign(static_cast<size_t>(n_theta), {0.0, 0.0});
    validateCircleField(w);
    return w;
}

void validateCircleField(const CircleField& w) {
    requireGrid(w.size());
    for (const auto& v : w.values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("circle field contains non-finite values");
    }
}

DnoidalGroundState groundState1d(double m, int kappa) {
    if (!(m > 0.0)) throw std::invalid_argument("mass must be positive");
    if (kappa != 1 && kappa != -1) throw std::invalid_argument("kappa must be +1 or -1");

    DnoidalGroundState gs{};
    gs.kappa = kappa;
    gs.m = m;
    const double twoPiSq = 2.0 * kPi * kPi;
    if (kappa == 1 || m <= twoPiSq) {
        gs.branch = Branch::Constant;
        gs.k = 0.0;
        gs.alpha = 0.0;
        gs.beta = 0.0;
        gs.mu_inf = -kappa * m / (4.0 * kPi * kPi);
        return gs;
    }
    gs.branch = Branch::Dnoidal;
    const EllipticModulus k = invertMass(m);
    const double K = completeK(k);
    gs.k = k.value();
    gs.beta = kPi / K;
    gs.alpha = std::sqrt(gs.beta * gs.beta / (4.0 * kPi));
    gs.mu_inf = (2.0 - gs.k * gs.k) * K * K / (kPi * kPi);
    return gs;
}

double groundStateValue(const DnoidalGroundState& gs, double theta) {
    if (gs.branch == Branch::Constant) return std::sqrt(gs.m / (2.0 * kPi));
    return jacobi(theta / gs.beta, EllipticModulus(gs.k)).dn / gs.alpha;
}

CircleField sampleGroundState(const DnoidalGroundState& gs, int n_theta) {
    requireGrid(n_theta);
    CircleField w = CircleField::zeros(n_theta);
    for (int i = 0; i < n_theta; ++i)
        w.values[i] = groundStateValue(gs, 2.0 * kPi * i / n_theta);
    return w;
}

double mass1d(const CircleField& w) {
    validateCircleField(w);
    double acc = 0.0;
    for (const auto& v : w.values) acc += std::norm(v);
    return 2.0 * kPi / w.size() * acc;
}

double h1Distance(const CircleField& a, const CircleField& b) {
    if (a.size() != b.size()) throw std::invalid_argument("h1Distance: size mismatch");
    validateCircleField(a);
    validateCircleField(b);
    const int n = a.size();
    std::vector<std::complex<double>> d(a.values);
    for (int i = 0; i < n; ++i) d[i] -= b.values[i];
    dft::forward(d.data(), n);
    double acc = 0.0;
    for (int s = 0; s < n; ++s) {
        const double l = dft::frequency(s, n);
        acc += (1.0 + l * l) * std::norm(d[s]);
    }
    return std::sqrt(acc * 2.0 * kPi / (static_cast<double>(n) * n));
}

double energy1d(const CircleField& w, int kappa) {
    validateCircleField(w);
    const int n = w.size();
    std::vector<std::complex<double>> hat(w.values);
    dft::forward(hat.data(), n);

    double kinetic = 0.0;
    for (int s = 0; s < n; ++s) {
        const double l = dft::frequency(s, n);
        kinetic += l * l * std::norm(hat[s]);
    }
    kinetic *= kPi / (static_cast<double>(n) * n);

    double quartic = 0.0;
    for (const auto& v : w.values) {
        const double a = std::norm(v);
        quartic += a * a;
    }
    quartic *= kappa / (4.0 * n);

    return kinetic + quartic;
}

std::vector<EigenPair> linearizedSpectrum1d(const DnoidalGroundState& gs, int n_eigs,
                                            int n_theta) {
    requireGrid(n_theta);
    if (n_theta > 2048) throw std::invalid_argument("dense spectrum limited to N_theta <= 2048");
    if (n_eigs < 1 || n_eigs > n_theta) throw std::invalid_argument("bad n_eigs");
    const double twoPiSq = 2.0 * kPi * kPi;
    if (gs.branch == Branch::Constant && gs.kappa == -1 &&
        std::abs(gs.m - twoPiSq) <= 16.0 * std::numeric_limits<double>::epsilon() * twoPiSq)
        throw DegenerateBranch();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assembleLinearized(gs, n_theta));
    std::vector<EigenPair> out(static_cast<size_t>(n_eigs));
    for (int i = 0; i < n_eigs; ++i) {
        out[i].value = es.eigenvalues()(i);
        out[i].vector.assign(es.eigenvectors().col(i).data(),
                             es.eigenvectors().col(i).data() + n_theta);
    }
    return out;
}

double coercivityConstant1d(const DnoidalGroundState& gs, int n_theta) {
    requireGrid(n_theta);
    if (n_theta > 2048) throw std::invalid_argument("dense spectrum limited to N_theta <= 2048");
    const int n = n_theta;

    Eigen::MatrixXd A = assembleLinearized(gs, n);

    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q(i) = groundStateValue(gs, 2.0 * kPi * i / n);

    // spectral derivative of the profile; identically zero on the constant branch
    std::vector<std::complex<double>> dq(q.data(), q.data() + n);
    dft::forward(dq.data(), n);
    for (int s = 0; s < n; ++s) dq[s] *= std::complex<double>(0.0, dft::frequency(s, n));
    dft::inverse(dq.data(), n);
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = dq[i].real();

    q.normalize();
    p -= q.dot(p) * q;
    const bool hasKernelDir = p.norm() > 1e-10;
    if (hasKernelDir) p.normalize();

    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n) - q * q.transpose();
    if (hasKernelDir) P -= p * p.transpose();

    Eigen::MatrixXd B = P * A * P;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (B + B.transpose()));
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd v = es.eigenvectors().col(i);
        if ((P * v).norm() > 0.5) return es.eigenvalues()(i);
    }
    throw std::runtime_error("coercivity: no eigenvector inside the constrained subspace");
}

std::vector<CircleField> evolve1d(const CircleField& w0, int kappa, double dt, double T) {
    validateCircleField(w0);
    if (!(dt > 0.0) || !(T > 0.0) || dt > T * (1.0 + 1e-12))
        throw std::invalid_argument("need 0 < dt <= T");
    const int n = w0.size();
    const long steps = std::max(1L, std::lround(T / dt));
    const double h = T / static_cast<double>(steps);

    std::vector<CircleField> traj;
    traj.reserve(static_cast<size_t>(steps) + 1);
    traj.push_back(w0);

    CircleField w = w0;
    std::vector<std::complex<double>> hat(static_cast<size_t>(n));
    const double nl = kappa / (2.0 * kPi);

    std::vector<double> linPhase(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s) {
        const double l = dft::frequency(s, n);
        linPhase[s] = l * l * h;
    }

    for (long step = 0; step < steps; ++step) {
        for (auto& v : w.values) v *= std::polar(1.0, -nl * std::norm(v) * 0.5 * h);
        hat = w.values;
        dft::forward(hat.data(), n);
        for (int s = 0; s < n; ++s) hat[s] *= std::polar(1.0, -linPhase[s]);
        dft::inverse(hat.data(), n);
        w.values = hat;
        for (auto& v : w.values) v *= std::polar(1.0, -nl * std::norm(v) * 0.5 * h);
        traj.push_back(w);
    }
    return traj;
}

} // namespace torusgpe
