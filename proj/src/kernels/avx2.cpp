#include "torusgpe/kernels.hpp"

// Compiled with -mavx2 -mfma (see CMakeLists); every entry point is reached
// only through the runtime-dispatched table.

#if defined(TORUSGPE_AVX2_TU) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace torusgpe::kernels {

namespace {

// lanes hold two complex values as [re0 im0 re1 im1]
inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d bre = _mm256_movedup_pd(b);
    const __m256d bim = _mm256_permute_pd(b, 0xF);
    const __m256d asw = _mm256_permute_pd(a, 0x5);
    return _mm256_fmaddsub_pd(a, bre, _mm256_mul_pd(asw, bim));
}

inline __m256d loadc(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void storec(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

inline __m256d bcast(cplx c) {
    return _mm256_broadcast_pd(reinterpret_cast<const __m128d*>(&c));
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// |v|^2 duplicated into both lanes of each complex slot
inline __m256d mod2dup(__m256d v) {
    const __m256d sq = _mm256_mul_pd(v, v);
    return _mm256_add_pd(sq, _mm256_permute_pd(sq, 0x5));
}

void cycFwd(cplx* vi, const cplx* vm, const cplx* vp, const cplx* gm, const cplx* alpha,
            const cplx* beta, const cplx* gamma, const cplx* a, const cplx* invd, std::size_t n,
            std::size_t period) {
    for (std::size_t base = 0; base < n; base += period) {
        for (std::size_t l = 0; l < period; l += 2) {
            const std::size_t k = base + l;
            __m256d rhs = cmul(loadc(vi + k), loadc(beta + l));
            rhs = _mm256_add_pd(rhs, cmul(loadc(vm + k), loadc(alpha + l)));
            rhs = _mm256_add_pd(rhs, cmul(loadc(vp + k), loadc(gamma + l)));
            rhs = _mm256_sub_pd(rhs, cmul(loadc(gm + k), loadc(a + l)));
            storec(vi + k, cmul(rhs, loadc(invd + l)));
        }
    }
}

void cycBack(cplx* vi, const cplx* vp, const cplx* cp, std::size_t n, std::size_t period) {
    for (std::size_t base = 0; base < n; base += period) {
        for (std::size_t l = 0; l < period; l += 2) {
            const std::size_t k = base + l;
            storec(vi + k, _mm256_sub_pd(loadc(vi + k), cmul(loadc(cp + l), loadc(vp + k))));
        }
    }
}

void rowFwdPlane(cplx* plane, cplx* scratch, const cplx* alpha, const cplx* beta,
                 const cplx* gamma, const cplx* a, const cplx* invd, std::size_t nrows,
                 std::size_t ncols) {
    for (std::size_t c = 0; c < ncols; ++c) scratch[c] = 0.0;
    for (std::size_t j = 0; j < nrows; ++j) {
        cplx* row = plane + j * ncols;
        const cplx* below = (j + 1 < nrows) ? row + ncols : row;
        const cplx* gprev = (j > 0) ? row - ncols : row;
        const __m256d va = bcast((j > 0) ? a[j] : cplx(0.0));
        const __m256d vg = bcast((j + 1 < nrows) ? gamma[j] : cplx(0.0));
        const __m256d vb = bcast(beta[j]);
        const __m256d val = bcast(alpha[j]);
        const __m256d vd = bcast(invd[j]);
        for (std::size_t c = 0; c < ncols; c += 2) {
            const __m256d orig = loadc(row + c);
            __m256d rhs = cmul(orig, vb);
            rhs = _mm256_add_pd(rhs, cmul(loadc(scratch + c), val));
            rhs = _mm256_add_pd(rhs, cmul(loadc(below + c), vg));
            rhs = _mm256_sub_pd(rhs, cmul(loadc(gprev + c), va));
            storec(row + c, cmul(rhs, vd));
            storec(scratch + c, orig);
        }
    }
}

void rowBackPlane(cplx* plane, const cplx* cp, std::size_t nrows, std::size_t ncols) {
    for (std::size_t j = nrows - 1; j-- > 0;) {
        cplx* row = plane + j * ncols;
        const cplx* next = row + ncols;
        const __m256d vc = bcast(cp[j]);
        for (std::size_t c = 0; c < ncols; c += 2)
            storec(row + c, _mm256_sub_pd(loadc(row + c), cmul(vc, loadc(next + c))));
    }
}

// sin/cos on [-pi/4, pi/4] after quadrant reduction; adequate for phases
// well below the Payne-Hanek regime (|x| up to ~1e3)
constexpr double kTwoOverPi = 0.63661977236758134308;
constexpr double kPio2Hi = 1.5707963267948966e+00;
constexpr double kPio2Lo = 6.123233995736766e-17;

inline void sincos4(__m256d x, __m256d& s, __m256d& c) {
    const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2Hi), x);
    r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2Lo), r);
    const __m256d r2 = _mm256_mul_pd(r, r);

    __m256d sp = _mm256_set1_pd(-7.6471637318198164759e-13);
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(1.6059043836821614599e-10));
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(-2.5052108385441718775e-8));
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(2.7557319223985890653e-6));
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(-1.9841269841269841270e-4));
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(8.3333333333333333333e-3));
    sp = _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(-1.6666666666666666667e-1));
    sp = _mm256_mul_pd(r, _mm256_fmadd_pd(sp, r2, _mm256_set1_pd(1.0)));

    __m256d cp = _mm256_set1_pd(4.7794773323873852974e-14);
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(-1.1470745597729724714e-11));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(2.0876756987868098979e-9));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(-2.7557319223985890653e-7));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(2.4801587301587301587e-5));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(-1.3888888888888888889e-3));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(4.1666666666666666667e-2));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(-0.5));
    cp = _mm256_fmadd_pd(cp, r2, _mm256_set1_pd(1.0));

    const __m128i q32 = _mm256_cvtpd_epi32(k);
    const __m256i q = _mm256_cvtepi32_epi64(q32);
    const __m256i one = _mm256_set1_epi64x(1);
    const __m256i two = _mm256_set1_epi64x(2);
    const __m256d swap =
        _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
    const __m256d negs =
        _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, two), two));
    const __m256d negc = _mm256_castsi256_pd(
        _mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), two));
    const __m256d signbit = _mm256_set1_pd(-0.0);

    s = _mm256_blendv_pd(sp, cp, swap);
    c = _mm256_blendv_pd(cp, sp, swap);
    s = _mm256_xor_pd(s, _mm256_and_pd(negs, signbit));
    c = _mm256_xor_pd(c, _mm256_and_pd(negc, signbit));
}

// 5th/4th order expansions; error below 1e-24 at the threshold
inline void sincosSmall(__m256d x, __m256d& s, __m256d& c) {
    const __m256d x2 = _mm256_mul_pd(x, x);
    __m256d sp = _mm256_fmadd_pd(x2, _mm256_set1_pd(8.3333333333333333333e-3),
                                 _mm256_set1_pd(-1.6666666666666666667e-1));
    s = _mm256_mul_pd(x, _mm256_fmadd_pd(sp, x2, _mm256_set1_pd(1.0)));
    __m256d cq = _mm256_fmadd_pd(x2, _mm256_set1_pd(4.1666666666666666667e-2),
                                 _mm256_set1_pd(-0.5));
    c = _mm256_fmadd_pd(cq, x2, _mm256_set1_pd(1.0));
}

void cubicPhase(cplx* v, std::size_t n, double alpha) {
    const __m256d va = _mm256_set1_pd(alpha);
    const __m256d thresh = _mm256_set1_pd(1e-3);
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d z = loadc(v + i);
        const __m256d x = _mm256_mul_pd(va, mod2dup(z));
        const __m256d ax = _mm256_and_pd(x, absmask);
        __m256d s, c;
        if (_mm256_movemask_pd(_mm256_cmp_pd(ax, thresh, _CMP_LT_OQ)) == 0xF)
            sincosSmall(x, s, c);
        else
            sincos4(x, s, c);
        const __m256d rot = _mm256_blend_pd(c, s, 0xA);
        storec(v + i, cmul(z, rot));
    }
    for (; i < n; ++i) {
        const double m2 = v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
        const double x = alpha * m2;
        v[i] *= cplx(std::cos(x), std::sin(x));
    }
}

void cubicDamp(cplx* v, std::size_t n, double beta) {
    const __m256d vb = _mm256_set1_pd(beta);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d z = loadc(v + i);
        const __m256d f = _mm256_fmadd_pd(vb, mod2dup(z), one);
        storec(v + i, _mm256_mul_pd(z, f));
    }
    for (; i < n; ++i) {
        const double m2 = v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
        v[i] *= 1.0 + beta * m2;
    }
}

double wgridSum2(const cplx* plane, const double* roww, const double* colw, std::size_t nrows,
                 std::size_t ncols) {
    double total = 0.0;
    for (std::size_t j = 0; j < nrows; ++j) {
        const cplx* row = plane + j * ncols;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t c = 0; c < ncols; c += 2) {
            const __m128d w2 = _mm_loadu_pd(colw + c);
            const __m256d wd = _mm256_permute4x64_pd(_mm256_castpd128_pd256(w2), 0x50);
            acc = _mm256_fmadd_pd(mod2dup(loadc(row + c)), wd, acc);
        }
        total += roww[j] * hsum(acc);
    }
    return 0.5 * total;
}

double wrowSum4(const cplx* plane, const double* roww, std::size_t nrows, std::size_t ncols) {
    double total = 0.0;
    for (std::size_t j = 0; j < nrows; ++j) {
        const cplx* row = plane + j * ncols;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t c = 0; c < ncols; c += 2) {
            const __m256d m2 = mod2dup(loadc(row + c));
            acc = _mm256_fmadd_pd(m2, m2, acc);
        }
        total += roww[j] * hsum(acc);
    }
    return 0.5 * total;
}

void waccumRows(cplx* acc, const cplx* plane, const double* roww, std::size_t nrows,
                std::size_t ncols) {
    for (std::size_t j = 0; j < nrows; ++j) {
        const cplx* row = plane + j * ncols;
        const __m256d w = _mm256_set1_pd(roww[j]);
        for (std::size_t c = 0; c < ncols; c += 2)
            storec(acc + c, _mm256_fmadd_pd(w, loadc(row + c), loadc(acc + c)));
    }
}

void rank1Sub(cplx* plane, const double* rowc, const cplx* col, std::size_t nrows,
              std::size_t ncols) {
    for (std::size_t j = 0; j < nrows; ++j) {
        cplx* row = plane + j * ncols;
        const __m256d c0 = _mm256_set1_pd(rowc[j]);
        for (std::size_t c = 0; c < ncols; c += 2)
            storec(row + c, _mm256_fnmadd_pd(c0, loadc(col + c), loadc(row + c)));
    }
}

}  // namespace

const Ops* avx2OpsOrNull() {
    static const Ops table = {cycFwd,    cycBack,  rowFwdPlane, rowBackPlane, cubicPhase,
                              cubicDamp, wgridSum2, wrowSum4,    waccumRows,   rank1Sub};
    return &table;
}

}  // namespace torusgpe::kernels

#else

namespace torusgpe::kernels {
const Ops* avx2OpsOrNull() { return nullptr; }
}  // namespace torusgpe::kernels

#endif
