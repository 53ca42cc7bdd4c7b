#include "torusgpe/core3d.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "symtridiag.hpp"
#include "torusgpe/dft.hpp"
#include "torusgpe/kernels.hpp"

static_assert(std::endian::native == std::endian::little,
              "field snapshots assume a little-endian host");

namespace torusgpe {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool isPow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct AxialEigen {
    double nu, nu_prime;
    std::vector<double> phi;  // unit sum wz phi^2
};

AxialEigen solveAxial(const std::vector<double>& z, const std::vector<double>& wz, double hz) {
    const auto t = detail::assembleAxialTridiag(z, wz, hz);
    std::vector<std::vector<double>> starts(2);
    for (int j = 0; j < 2; ++j) {
        starts[j].resize(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double q = (j == 0) ? 1.0 : z[i];
            starts[j][i] = q * std::exp(-0.5 * z[i] * z[i]) * std::sqrt(wz[i]);
        }
    }
    auto pairs = detail::lowestPairs(t, starts, 0.5, 2048);
    std::vector<double> y = pairs[0].vec;
    if (!detail::reconstructTails(t, pairs[0].value, y)) y = pairs[0].vec;

    AxialEigen r;
    r.nu = pairs[0].value;
    r.nu_prime = pairs[1].value;
    r.phi.resize(z.size());
    double m2 = 0.0;
    std::size_t ip = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        r.phi[i] = y[i] / std::sqrt(wz[i]);
        m2 += wz[i] * r.phi[i] * r.phi[i];
        if (std::abs(r.phi[i]) > std::abs(r.phi[ip])) ip = i;
    }
    const double sc = ((r.phi[ip] < 0.0) ? -1.0 : 1.0) / std::sqrt(m2);
    for (auto& v : r.phi) v *= sc;
    return r;
}

std::vector<double> onesVec(std::size_t n) { return std::vector<double>(n, 1.0); }

void checkBasisGrid(const Field3D& v, const ProjectionBasis& basis) {
    if (v.grid != basis.grid)
        throw std::invalid_argument("projection basis was built on a different grid");
}

}  // namespace

std::shared_ptr<const Grid3D> Grid3D::make(const RadialGrid& radial,
                                           const PotentialSpec& potential, double z_max,
                                           std::size_t n_z, std::size_t n_theta) {
    if (!(z_max >= 8.0)) throw std::invalid_argument("z_max must be at least 8");
    if (n_z < 128) throw std::invalid_argument("N_z must be at least 128");
    if (n_theta < 16 || !isPow2(n_theta))
        throw std::invalid_argument("N_theta must be a power of two, at least 16");
    if (!std::isinf(radial.omega) && potential.omega != radial.omega)
        throw std::invalid_argument("grid and potential disagree on omega");

    auto g = std::make_shared<Grid3D>();
    g->radial = radial;
    g->potential = potential;
    g->z_max = z_max;
    g->z_step = 2.0 * z_max / static_cast<double>(n_z - 1);
    g->z_nodes.resize(n_z);
    g->z_weights.assign(n_z, g->z_step);
    for (std::size_t j = 0; j < n_z; ++j)
        g->z_nodes[j] = -z_max + g->z_step * static_cast<double>(j);
    g->z_weights.front() = 0.5 * g->z_step;
    g->z_weights.back() = 0.5 * g->z_step;
    g->n_theta = n_theta;
    g->theta_weight = kTwoPi / static_cast<double>(n_theta);

    const std::size_t ns = radial.size();
    g->u_samples.resize(ns);
    g->sigma_half.resize(ns);
    g->inv_sigma_weights.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        g->u_samples[i] = evalU(potential, radial.nodes[i]);
        g->sigma_half[i] = radial.sigmaAt(radial.nodes[i] + 0.5 * radial.step);
    }
    if (std::isinf(radial.omega)) {
        g->inv_sigma_weights = radial.quad_weights;
    } else {
        g->inv_sigma_weights[0] = std::sqrt(radial.omega);
        for (std::size_t i = 1; i < ns; ++i)
            g->inv_sigma_weights[i] = radial.step / radial.sigma[i];
    }
    return g;
}

double Grid3D::thetaNode(std::size_t l) const {
    return kTwoPi * static_cast<double>(l) / static_cast<double>(n_theta);
}

Field3D Field3D::zeros(std::shared_ptr<const Grid3D> g) {
    Field3D v;
    v.values.assign(g->points(), std::complex<double>(0.0, 0.0));
    v.grid = std::move(g);
    return v;
}

void validateField(const Field3D& v) {
    if (!v.grid) throw std::invalid_argument("field has no grid");
    if (v.values.size() != v.grid->points())
        throw std::invalid_argument("field size does not match its grid");
    for (const auto& z : v.values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("field contains non-finite values");
}

double massMod(const Field3D& v) {
    const auto& g = *v.grid;
    const auto& k = kernels::ops();
    const auto ones = onesVec(g.nTheta());
    const std::size_t plane = g.nZ() * g.nTheta();
    double total = 0.0;
    for (std::size_t i = 0; i < g.nS(); ++i)
        total += g.radial.quad_weights[i] *
                 k.wgrid_sum2(v.values.data() + i * plane, g.z_weights.data(), ones.data(),
                              g.nZ(), g.nTheta());
    return g.theta_weight * total;
}

double normInvSigma2(const Field3D& v) {
    const auto& g = *v.grid;
    const auto& k = kernels::ops();
    const auto ones = onesVec(g.nTheta());
    const std::size_t plane = g.nZ() * g.nTheta();
    double total = 0.0;
    for (std::size_t i = 0; i < g.nS(); ++i)
        total += g.inv_sigma_weights[i] *
                 k.wgrid_sum2(v.values.data() + i * plane, g.z_weights.data(), ones.data(),
                              g.nZ(), g.nTheta());
    return g.theta_weight * total;
}

double szSeminorm2(const Field3D& v, double Lambda) {
    const auto& g = *v.grid;
    const std::size_t ns = g.nS(), nz = g.nZ(), nt = g.nTheta();
    const std::size_t plane = nz * nt;
    const double h = g.radial.step, hz = g.z_step;
    const auto* p = v.values.data();

    double acc = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        const auto* pi = p + i * plane;
        // radial fluxes, including the zero ghost value one spacing past the
        // last node
        const double cs = g.sigma_half[i] / h;
        if (i + 1 < ns) {
            const auto* pn = pi + plane;
            double fs = 0.0;
            for (std::size_t j = 0; j < nz; ++j) {
                double rowsum = 0.0;
                for (std::size_t l = 0; l < nt; ++l) {
                    const auto d = pn[j * nt + l] - pi[j * nt + l];
                    rowsum += d.real() * d.real() + d.imag() * d.imag();
                }
                fs += g.z_weights[j] * rowsum;
            }
            acc += cs * fs;
        } else {
            double fs = 0.0;
            for (std::size_t j = 0; j < nz; ++j) {
                double rowsum = 0.0;
                for (std::size_t l = 0; l < nt; ++l) {
                    const auto d = pi[j * nt + l];
                    rowsum += d.real() * d.real() + d.imag() * d.imag();
                }
                fs += g.z_weights[j] * rowsum;
            }
            acc += cs * fs;
        }
        // axial fluxes
        const double ws = g.radial.quad_weights[i];
        double fz = 0.0;
        for (std::size_t j = 0; j + 1 < nz; ++j) {
            const auto* r0 = pi + j * nt;
            const auto* r1 = r0 + nt;
            double rowsum = 0.0;
            for (std::size_t l = 0; l < nt; ++l) {
                const auto d = r1[l] - r0[l];
                rowsum += d.real() * d.real() + d.imag() * d.imag();
            }
            fz += rowsum;
        }
        acc += ws * fz / hz;
        // potential and -Lambda mass
        double fp = 0.0;
        for (std::size_t j = 0; j < nz; ++j) {
            const double coef = g.z_weights[j] *
                                (g.u_samples[i] + g.z_nodes[j] * g.z_nodes[j] - Lambda);
            const auto* r = pi + j * nt;
            double rowsum = 0.0;
            for (std::size_t l = 0; l < nt; ++l)
                rowsum += r[l].real() * r[l].real() + r[l].imag() * r[l].imag();
            fp += coef * rowsum;
        }
        acc += ws * fp;
    }
    return g.theta_weight * acc;
}

double thetaSeminorm2(const Field3D& v) {
    const auto& g = *v.grid;
    const std::size_t ns = g.nS(), nz = g.nZ(), nt = g.nTheta();
    const int n = static_cast<int>(nt);
    std::vector<std::complex<double>> row(nt);
    double acc = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        const double wi = g.inv_sigma_weights[i];
        for (std::size_t j = 0; j < nz; ++j) {
            std::memcpy(row.data(), v.values.data() + (i * nz + j) * nt,
                        nt * sizeof(std::complex<double>));
            dft::forward(row.data(), n);
            double rowsum = 0.0;
            for (int l = 0; l < n; ++l) {
                const double f = static_cast<double>(dft::frequency(l, n));
                rowsum += f * f * std::norm(row[l]);
            }
            acc += wi * g.z_weights[j] * rowsum;
        }
    }
    // Plancherel for the unnormalized transform: theta_weight / N_theta
    return acc * kTwoPi / (static_cast<double>(nt) * static_cast<double>(nt));
}

EnergyBreakdown energyMod(const Field3D& v, int kappa, double Lambda) {
    if (kappa != 1 && kappa != -1) throw std::invalid_argument("kappa must be +1 or -1");
    const auto& g = *v.grid;
    if (std::isinf(g.radial.omega))
        throw std::invalid_argument("energyMod needs a finite-omega grid");
    const auto& k = kernels::ops();
    const std::size_t plane = g.nZ() * g.nTheta();
    EnergyBreakdown e;
    e.sz_seminorm2 = szSeminorm2(v, Lambda);
    e.theta_seminorm2 = thetaSeminorm2(v);
    double q = 0.0;
    for (std::size_t i = 0; i < g.nS(); ++i)
        q += g.radial.quad_weights[i] *
             k.wrow_sum4(v.values.data() + i * plane, g.z_weights.data(), g.nZ(), g.nTheta());
    e.quartic = g.theta_weight * q;
    e.total = 0.5 * g.radial.omega * e.sz_seminorm2 + 0.5 * e.theta_seminorm2 +
              0.25 * static_cast<double>(kappa) * e.quartic;
    return e;
}

ProjectionBasis buildProjectionBasis(std::shared_ptr<const Grid3D> grid) {
    ProjectionBasis b;
    b.grid = grid;
    b.n_z = grid->nZ();

    const auto tr = solveTransverse(grid->radial, grid->potential, 2);
    b.phi_s = tr.phi;
    b.lambda_s = tr.lambda;
    b.lambda_s_prime = tr.lambda_prime;

    const auto ax = solveAxial(grid->z_nodes, grid->z_weights, grid->z_step);
    b.phi_z = ax.phi;
    b.nu_z = ax.nu;
    b.nu_z_prime = ax.nu_prime;

    b.Lambda = b.lambda_s + b.nu_z;
    b.Lambda_prime = std::min(b.lambda_s_prime + b.nu_z, b.lambda_s + b.nu_z_prime);

    const std::size_t ns = grid->nS(), nz = grid->nZ();
    b.Phi.resize(ns * nz);
    b.Phi_tilde.resize(ns * nz);
    double norm2_phi = 0.0, norm2_chi = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        const double chi = cutoffChi(grid->radial.omega, grid->radial.nodes[i]);
        for (std::size_t j = 0; j < nz; ++j) {
            const double w = grid->radial.quad_weights[i] * grid->z_weights[j];
            const double phi = b.phi_s[i] * b.phi_z[j];
            b.Phi[i * nz + j] = phi;
            b.Phi_tilde[i * nz + j] = chi * phi;
            norm2_phi += w * phi * phi;
            norm2_chi += w * chi * chi * phi * phi;
        }
    }
    const double inv_phi = 1.0 / std::sqrt(norm2_phi);
    b.norm_chi_phi = std::sqrt(norm2_chi) * inv_phi;
    const double inv_chi = 1.0 / std::sqrt(norm2_chi);
    for (auto& x : b.Phi) x *= inv_phi;
    for (auto& x : b.Phi_tilde) x *= inv_chi;
    return b;
}

namespace {

CircleField contractAgainst(const Field3D& v, const std::vector<double>& profile,
                            const Grid3D& g) {
    const auto& k = kernels::ops();
    const std::size_t ns = g.nS(), nz = g.nZ(), nt = g.nTheta();
    CircleField out = CircleField::zeros(static_cast<int>(nt));
    std::vector<double> rw(nz);
    for (std::size_t i = 0; i < ns; ++i) {
        const double wi = g.radial.quad_weights[i];
        for (std::size_t j = 0; j < nz; ++j) rw[j] = wi * g.z_weights[j] * profile[i * nz + j];
        k.waccum_rows(out.values.data(), v.values.data() + i * nz * nt, rw.data(), nz, nt);
    }
    return out;
}

}  // namespace

ProjectionResult project(const Field3D& v, const ProjectionBasis& basis) {
    checkBasisGrid(v, basis);
    const auto& g = *v.grid;
    const auto& k = kernels::ops();
    const std::size_t nz = g.nZ(), nt = g.nTheta();

    ProjectionResult r;
    r.v_par = contractAgainst(v, basis.Phi_tilde, g);
    r.v_perp = v;
    for (std::size_t i = 0; i < g.nS(); ++i)
        k.rank1_sub(r.v_perp.values.data() + i * nz * nt, basis.Phi_tilde.data() + i * nz, // rows
                    r.v_par.values.data(), nz, nt);
    return r;
}

CircleField projectUntruncated(const Field3D& v, const ProjectionBasis& basis) {
    checkBasisGrid(v, basis);
    return contractAgainst(v, basis.Phi, *v.grid);
}

Field3D threadCircleField(const CircleField& w, const ProjectionBasis& basis) {
    const auto& g = *basis.grid;
    if (w.values.size() != g.nTheta())
        throw std::invalid_argument("threadCircleField: N_theta mismatch");
    validateCircleField(w);
    Field3D v = Field3D::zeros(basis.grid);
    for (std::size_t i = 0; i < g.nS(); ++i)
        for (std::size_t j = 0; j < g.nZ(); ++j) {
            const double p = basis.phiTildeAt(i, j);
            if (p == 0.0) continue;
            for (std::size_t l = 0; l < g.nTheta(); ++l) v.at(i, j, l) = p * w.values[l];
        }
    return v;
}

namespace {

const char* variantName(PotentialVariant v) {
    switch (v) {
        case PotentialVariant::Quadratic: return "quadratic";
        case PotentialVariant::GaussianRing: return "gaussian_ring";
        default: return "tabulated";
    }
}

void writeU64(std::ofstream& f, std::uint64_t x) {
    f.write(reinterpret_cast<const char*>(&x), 8);
}
void writeF64(std::ofstream& f, double x) { f.write(reinterpret_cast<const char*>(&x), 8); }

std::uint64_t readU64(std::ifstream& f) {
    std::uint64_t x = 0;
    f.read(reinterpret_cast<char*>(&x), 8);
    return x;
}
double readF64(std::ifstream& f) {
    double x = 0;
    f.read(reinterpret_cast<char*>(&x), 8);
    return x;
}

}  // namespace

void saveField(const Field3D& v, const std::string& path) {
    validateField(v);
    const auto& g = *v.grid;
    if (std::isinf(g.radial.omega))
        throw std::invalid_argument("flat reference grids do not serialize");
    if (g.potential.variant == PotentialVariant::Tabulated)
        throw std::invalid_argument("tabulated potentials do not round-trip through snapshots");

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    writeF64(f, g.radial.omega);
    writeU64(f, g.nS());
    writeU64(f, g.nZ());
    writeU64(f, g.nTheta());
    writeF64(f, g.radial.s_max);
    writeF64(f, g.z_max);
    f.write(reinterpret_cast<const char*>(v.values.data()),
            static_cast<std::streamsize>(v.values.size() * sizeof(std::complex<double>)));
    if (!f) throw std::runtime_error("short write to " + path);
    f.close();

    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "{\n"
                  "  \"format\": \"complex128-theta-fastest\",\n"
                  "  \"omega\": %.17g,\n"
                  "  \"n_s\": %zu,\n"
                  "  \"n_z\": %zu,\n"
                  "  \"n_theta\": %zu,\n"
                  "  \"s_min\": %.17g,\n"
                  "  \"s_max\": %.17g,\n"
                  "  \"z_max\": %.17g,\n"
                  "  \"potential\": {\"variant\": \"%s\", \"m_param\": %.17g}\n"
                  "}\n",
                  g.radial.omega, g.nS(), g.nZ(), g.nTheta(), g.radial.s_min, g.radial.s_max,
                  g.z_max, variantName(g.potential.variant), g.potential.m_param);
    std::ofstream side(path + ".json", std::ios::trunc);
    if (!side) throw std::runtime_error("cannot open " + path + ".json for writing");
    side << buf;
}

Field3D loadField(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    const double omega = readF64(f);
    const std::uint64_t ns = readU64(f);
    const std::uint64_t nz = readU64(f);
    const std::uint64_t nt = readU64(f);
    const double s_max = readF64(f);
    const double z_max = readF64(f);
    if (!f) throw std::runtime_error("truncated snapshot header in " + path);
    if (!std::isfinite(omega) || omega <= 0.0)
        throw std::invalid_argument("snapshot has an invalid omega");

    std::ifstream side(path + ".json");
    if (!side) throw std::runtime_error("missing sidecar " + path + ".json");
    nlohmann::json meta = nlohmann::json::parse(side);
    const std::string variant = meta.at("potential").at("variant").get<std::string>();
    PotentialSpec spec;
    if (variant == "quadratic") {
        spec = PotentialSpec::quadratic(omega);
    } else if (variant == "gaussian_ring") {
        spec = PotentialSpec::gaussianRing(omega, meta.at("potential").at("m_param").get<double>());
    } else {
        throw std::invalid_argument("snapshot potential variant '" + variant +
                                    "' cannot be reconstructed");
    }

    const auto radial = RadialGrid::make(omega, ns, s_max);
    auto grid = Grid3D::make(radial, spec, z_max, nz, nt);
    Field3D v = Field3D::zeros(grid);
    f.read(reinterpret_cast<char*>(v.values.data()),
           static_cast<std::streamsize>(v.values.size() * sizeof(std::complex<double>)));
    if (!f || f.gcount() !=
                  static_cast<std::streamsize>(v.values.size() * sizeof(std::complex<double>)))
        throw std::runtime_error("truncated snapshot payload in " + path);
    validateField(v);
    return v;
}

}  // namespace torusgpe
