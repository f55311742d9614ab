// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles, kept independent of the implementation paths they
// check: the DFT is the O(n^2) summation formula, convolution is the
// direct sliding window, dense layers are plain matvec loops.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracles {

using cplx = std::complex<double>;

// Unitary DFT by direct summation.
inline std::vector<cplx> dft_direct(const std::vector<cplx>& x, bool inverse) {
    const std::size_t n = x.size();
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = sign * 2.0 * 3.14159265358979323846 * static_cast<double>(k * m) / static_cast<double>(n);
            acc += x[m] * cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc * norm;
    }
    return out;
}

// Valid cross-correlation with stride (the network's convolution
// convention), single channel.
inline std::vector<std::vector<double>> conv2d_direct(const std::vector<std::vector<double>>& img,
                                                      const std::vector<std::vector<double>>& filt,
                                                      std::size_t stride, double bias = 0.0) {
    const std::size_t h = img.size(), w = img[0].size();
    const std::size_t kh = filt.size(), kw = filt[0].size();
    const std::size_t oh = (h - kh) / stride + 1, ow = (w - kw) / stride + 1;
    std::vector<std::vector<double>> out(oh, std::vector<double>(ow, 0.0));
    for (std::size_t r = 0; r < oh; ++r)
        for (std::size_t c = 0; c < ow; ++c) {
            double acc = bias;
            for (std::size_t p = 0; p < kh; ++p)
                for (std::size_t q = 0; q < kw; ++q) acc += filt[p][q] * img[r * stride + p][c * stride + q];
            out[r][c] = acc;
        }
    return out;
}

inline std::vector<double> matvec(const std::vector<std::vector<double>>& m, const std::vector<double>& x,
                                  const std::vector<double>& b) {
    std::vector<double> out(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
        double acc = b[j];
        for (std::size_t i = 0; i < x.size(); ++i) acc += m[j][i] * x[i];
        out[j] = acc;
    }
    return out;
}

// Deterministic test randomness.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed ^ 0x2545f4914f6cdd1dull) {}
    std::uint64_t next() {
        s_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53); }
    std::vector<cplx> cvec(std::size_t n, double amp = 1.0) {
        std::vector<cplx> v(n);
        for (auto& z : v) z = cplx(uniform(-amp, amp), uniform(-amp, amp));
        return v;
    }
    std::vector<double> rvec(std::size_t n, double amp = 1.0) {
        std::vector<double> v(n);
        for (auto& x : v) x = uniform(-amp, amp);
        return v;
    }

private:
    std::uint64_t s_;
};

}  // namespace oracles
