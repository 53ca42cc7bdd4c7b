#include <cmath>
#include <cstring>

#include "torusgpe/kernels.hpp"

namespace torusgpe::kernels {

namespace {

void cycFwd(cplx* vi, const cplx* vm, const cplx* vp, const cplx* gm, const cplx* alpha,
            const cplx* beta, const cplx* gamma, const cplx* a, const cplx* invd, std::size_t n,
            std::size_t period) {
    for (std::size_t base = 0; base < n; base += period) {
        for (std::size_t l = 0; l < period; ++l) {
            const std::size_t k = base + l;
            const cplx rhs = beta[l] * vi[k] + alpha[l] * vm[k] + gamma[l] * vp[k];
            vi[k] = (rhs - a[l] * gm[k]) * invd[l];
        }
    }
}

void cycBack(cplx* vi, const cplx* vp, const cplx* cp, std::size_t n, std::size_t period) {
    for (std::size_t base = 0; base < n; base += period)
        for (std::size_t l = 0; l < period; ++l) vi[base + l] -= cp[l] * vp[base + l];
}

void rowFwdPlane(cplx* plane, cplx* scratch, const cplx* alpha, const cplx* beta,
                 const cplx* gamma, const cplx* a, const cplx* invd, std::size_t nrows,
                 std::size_t ncols) {
    // scratch keeps the original previous row; the plane itself is
    // overwritten with the eliminated values row by row
    for (std::size_t c = 0; c < ncols; ++c) scratch[c] = 0.0;
    for (std::size_t j = 0; j < nrows; ++j) {
        cplx* row = plane + j * ncols;
        const cplx* below = (j + 1 < nrows) ? row + ncols : row;
        const cplx* gprev = (j > 0) ? row - ncols : row;
        const cplx ga = (j > 0) ? a[j] : cplx(0.0);
        const cplx gam = (j + 1 < nrows) ? gamma[j] : cplx(0.0);
        for (std::size_t c = 0; c < ncols; ++c) {
            const cplx orig = row[c];
            const cplx rhs = beta[j] * orig + alpha[j] * scratch[c] + gam * below[c];
            row[c] = (rhs - ga * gprev[c]) * invd[j];
            scratch[c] = orig;
        }
    }
}

void rowBackPlane(cplx* plane, const cplx* cp, std::size_t nrows, std::size_t ncols) {
    for (std::size_t j = nrows - 1; j-- > 0;) {
        cplx* row = plane + j * ncols;
        const cplx* next = row + ncols;
        for (std::size_t c = 0; c < ncols; ++c) row[c] -= cp[j] * next[c];
    }
}

void cubicPhase(cplx* v, std::size_t n, double alpha) {
    for (std::size_t i = 0; i < n; ++i) {
        const double m2 = v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
        const double x = alpha * m2;
        v[i] *= cplx(std::cos(x), std::sin(x));
    }
}

void cubicDamp(cplx* v, std::size_t n, double beta) {
    for (std::size_t i = 0; i < n; ++i) {
        const double m2 = v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
        v[i] *= 1.0 + beta * m2;
    }
}

double wgridSum2(const cplx* plane, const double* roww, const double* colw, std::size_t nrows,
                 std::size_t ncols) {
    double total = 0.0;
    for (std::size_t j = 0; j < nrows; ++j) {
        const cplx* row = plane + j * ncols;
        double rs = 0.0;
        for (std::size_t c = 0; c < ncols; ++c) {
            const double m2 = row[c].real() * row[c].real() + row[c].imag() * row[c].imag();
            rs += colw[c] * m2;
        }
        total += roww[j] * rs;
    }
    return total;
}

double wrowSum4(const cplx* plane, const double* roww, std::size_t nrows, std::size_t ncols) {
    double total = 0.0;
    for (std::size_t j = 0; j < nrows; ++j) {
        const cplx* row = plane + j * ncols;
        double rs = 0.0;
        for (std::size_t c = 0; c < ncols; ++c) {
            const double m2 = row[c].real() * row[c].real() + row[c].imag() * row[c].imag();
            rs += m2 * m2;
        }
        total += roww[j] * rs;
    }
    return total;
}

void waccumRows(cplx* acc, const cplx* plane, const double* roww, std::size_t nrows,
                std::size_t ncols) {
    for (std::size_t j = 0; j < nrows; ++j) {
        const cplx* row = plane + j * ncols;
        const double w = roww[j];
        for (std::size_t c = 0; c < ncols; ++c) acc[c] += w * row[c];
    }
}

void rank1Sub(cplx* plane, const double* rowc, const cplx* col, std::size_t nrows,
              std::size_t ncols) {
    for (std::size_t j = 0; j < nrows; ++j) {
        cplx* row = plane + j * ncols;
        const double c0 = rowc[j];
        for (std::size_t c = 0; c < ncols; ++c) row[c] -= c0 * col[c];
    }
}

}  // namespace

const Ops& scalarOps() {
    static const Ops table = {cycFwd,    cycBack,  rowFwdPlane, rowBackPlane, cubicPhase,
                              cubicDamp, wgridSum2, wrowSum4,    waccumRows,   rank1Sub};
    return table;
}

}  // namespace torusgpe::kernels
