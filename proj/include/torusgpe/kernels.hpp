#pragma once

#include <complex>
#include <cstddef>
#include <string>

namespace torusgpe::kernels {

using cplx = std::complex<double>;

// Hot inner loops for fields stored theta-fastest: a field is a stack of
// planes (one per radial node), each plane nrows x ncols with ncols = N_theta
// contiguous. All lengths passed to cyclic kernels must be multiples of the
// period; ncols and period must be even.
//
// Two coefficient broadcast patterns appear in the tridiagonal sweeps:
//   cyclic   coeff[idx % period]  (radial direction: per-theta-mode arrays)
//   rowwise  coeff[row]           (axial direction: one scalar per z row)
struct Ops {
    // vi <- ((beta.vi + alpha.vm + gamma.vp) - a.gm) . invd, coeffs cyclic.
    // Fused matvec + forward-elimination step of a plane recurrence.
    void (*cyc_fwd)(cplx* vi, const cplx* vm, const cplx* vp, const cplx* gm,
                    const cplx* alpha, const cplx* beta, const cplx* gamma, const cplx* a,
                    const cplx* invd, std::size_t n, std::size_t period);
    // vi <- vi - cp.vp, coeffs cyclic (back substitution step)
    void (*cyc_back)(cplx* vi, const cplx* vp, const cplx* cp, std::size_t n,
                     std::size_t period);

    // In-place Thomas sweep over the rows of one plane, one scalar
    // coefficient set per row; scratch holds >= ncols entries.
    void (*row_fwd_plane)(cplx* plane, cplx* scratch, const cplx* alpha, const cplx* beta,
                          const cplx* gamma, const cplx* a, const cplx* invd, std::size_t nrows,
                          std::size_t ncols);
    void (*row_back_plane)(cplx* plane, const cplx* cp, std::size_t nrows, std::size_t ncols);

    // v[i] *= exp(I alpha |v[i]|^2)
    void (*cubic_phase)(cplx* v, std::size_t n, double alpha);
    // v[i] *= 1 + beta |v[i]|^2
    void (*cubic_damp)(cplx* v, std::size_t n, double beta);

    // sum_{j,l} roww[j] colw[l] |plane[j,l]|^2
    double (*wgrid_sum2)(const cplx* plane, const double* roww, const double* colw,
                         std::size_t nrows, std::size_t ncols);
    // sum_{j,l} roww[j] |plane[j,l]|^4
    double (*wrow_sum4)(const cplx* plane, const double* roww, std::size_t nrows,
                        std::size_t ncols);
    // acc[l] += sum_j roww[j] plane[j,l]
    void (*waccum_rows)(cplx* acc, const cplx* plane, const double* roww, std::size_t nrows,
                        std::size_t ncols);
    // plane[j,l] -= rowc[j] col[l]
    void (*rank1_sub)(cplx* plane, const double* rowc, const cplx* col, std::size_t nrows,
                      std::size_t ncols);
};

// Active table, bound on first use. TORUSGPE_SIMD=scalar|avx2|auto overrides
// detection; forcing avx2 on a machine without it throws.
const Ops& ops();

// Reference table, always available; the equivalence tests pin the active
// table against it.
const Ops& scalarOps();

std::string activeKernelSet();
bool avx2Available();

}  // namespace torusgpe::kernels
