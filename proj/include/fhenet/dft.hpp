// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "fhenet/slot_vec.hpp"

namespace fhenet::dft {

/// In-place iterative radix-2 FFT, unnormalized, e^{-2*pi*i/n} convention.
/// Inverse applies the conjugate twiddles and divides by n.
void fft(std::vector<cplx>& a, bool inverse);

/// Row-major 2D FFT over an rows x cols matrix (both powers of two).
void fft2d(std::vector<cplx>& a, std::size_t rows, std::size_t cols, bool inverse);

/// Unnormalized 2D spectrum of a real filter zero-padded to rows x cols,
/// with the filter flipped in both axes so that pointwise spectral
/// multiplication realizes cross-correlation (the network convention).
std::vector<cplx> filter_spectrum(const std::vector<double>& filter, std::size_t kh, std::size_t kw,
                                  std::size_t rows, std::size_t cols);

}  // namespace fhenet::dft
