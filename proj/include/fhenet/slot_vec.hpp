// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "fhenet/errors.hpp"

namespace fhenet {

using cplx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

inline std::uint32_t log2_exact(std::size_t n) {
    std::uint32_t k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

inline std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 2;
    while (p < n) p <<= 1;
    return p;
}

/// Plaintext vector of 2^n complex slots: the cleartext mirror of a
/// ciphertext. Constructors reject non-power-of-two lengths and non-finite
/// values.
class SlotVec {
public:
    explicit SlotVec(std::size_t n) : slots_(check_len(n)) {}

    explicit SlotVec(std::vector<cplx> v) : slots_(std::move(v)) {
        check_len(slots_.size());
        for (const cplx& z : slots_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw PackingError("SlotVec: non-finite value");
    }

    static SlotVec from_real(std::span<const double> v) {
        std::vector<cplx> z(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) z[i] = cplx(v[i], 0.0);
        return SlotVec(std::move(z));
    }

    /// All slots set to the same real constant.
    static SlotVec constant(std::size_t n, double c) {
        SlotVec m(n);
        for (auto& z : m.slots_) z = cplx(c, 0.0);
        return m;
    }

    /// 1 at slot `pos`, 0 elsewhere.
    static SlotVec unit(std::size_t n, std::size_t pos) {
        SlotVec m(n);
        m.slots_.at(pos) = cplx(1.0, 0.0);
        return m;
    }

    std::size_t size() const { return slots_.size(); }

    const cplx& operator[](std::size_t i) const { return slots_[i]; }
    cplx& operator[](std::size_t i) { return slots_[i]; }

    const std::vector<cplx>& data() const { return slots_; }
    std::vector<cplx>& data() { return slots_; }

    std::vector<double> real_parts() const {
        std::vector<double> r(slots_.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = slots_[i].real();
        return r;
    }

private:
    static std::size_t check_len(std::size_t n) {
        if (!is_power_of_two(n)) throw PackingError("SlotVec: length must be a power of two >= 2");
        return n;
    }

    std::vector<cplx> slots_;
};

}  // namespace fhenet
