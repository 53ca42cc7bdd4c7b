#pragma once
// Thin FFTW wrapper for 1D complex transforms over the angular grid.
// Plans are cached per length and created with FFTW_ESTIMATE so repeated
// runs of the same configuration are bit-identical.

#include <complex>

namespace torusgpe::dft {

// In-place unnormalized forward transform, w_l = sum_j w_j exp(-i l theta_j).
void forward(std::complex<double>* data, int n);

// In-place inverse transform with 1/n normalization.
void inverse(std::complex<double>* data, int n);

// Batched variants: `count` transforms of length n, each contiguous,
// laid out back to back (stride n between transforms).
void forwardMany(std::complex<double>* data, int n, int count);
void inverseMany(std::complex<double>* data, int n, int count);

// Frequency of Fourier slot l in standard FFT ordering: 0,1,...,n/2-1,-n/2,...,-1.
inline int frequency(int slot, int n) { return slot < n / 2 ? slot : slot - n; }

} // namespace torusgpe::dft
