// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#include "fhenet/dft.hpp"

#include <cmath>

namespace fhenet::dft {

namespace {
constexpr double kTau = 6.283185307179586476925286766559;
}

void fft(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!is_power_of_two(n)) throw PackingError("fft: size must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTau : -kTau) / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv;
    }
}

void fft2d(std::vector<cplx>& a, std::size_t rows, std::size_t cols, bool inverse) {
    std::vector<cplx> buf;
    for (std::size_t r = 0; r < rows; ++r) {
        buf.assign(a.begin() + r * cols, a.begin() + (r + 1) * cols);
        fft(buf, inverse);
        std::copy(buf.begin(), buf.end(), a.begin() + r * cols);
    }
    buf.resize(rows);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) buf[r] = a[r * cols + c];
        fft(buf, inverse);
        for (std::size_t r = 0; r < rows; ++r) a[r * cols + c] = buf[r];
    }
}

std::vector<cplx> filter_spectrum(const std::vector<double>& filter, std::size_t kh, std::size_t kw,
                                  std::size_t rows, std::size_t cols) {
    if (filter.size() != kh * kw) throw ShapeError("filter_spectrum: filter size mismatch");
    if (kh > rows || kw > cols) throw ShapeError("filter_spectrum: filter larger than padded dims");
    std::vector<cplx> f(rows * cols, cplx(0.0, 0.0));
    for (std::size_t p = 0; p < kh; ++p)
        for (std::size_t q = 0; q < kw; ++q) f[p * cols + q] = cplx(filter[(kh - 1 - p) * kw + (kw - 1 - q)], 0.0);
    fft2d(f, rows, cols, false);
    return f;
}

}  // namespace fhenet::dft
