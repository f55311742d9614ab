// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "fhenet/context.hpp"

namespace fhenet::ckks {

/// Residue polynomial in Z_q[X]/(X^N + 1); q is the power-of-two modulus of
/// the level the polynomial lives at. Coefficients are kept in [0, q).
struct RingPoly {
    std::vector<mpz_class> c;

    explicit RingPoly(std::size_t n = 0) : c(n) {}
    std::size_t size() const { return c.size(); }
};

/// Leveled parameter set: ring dimension N, power-of-two modulus chain
/// q_l = 2^(log_q0 + l*log_scale), auxiliary key-switch modulus P.
struct CkksParams {
    std::uint32_t ring_dim = 4096;  // N, power of two
    int log_scale = 30;             // fixed-point scale 2^p
    int log_q0 = 40;                // base modulus bits
    int max_level = 8;              // L
    int log_aux = 0;                // key-switch modulus bits; 0 = log_qL + 64
    double sigma = 3.2;             // error std-dev
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> rotation_amounts;

    int log_q(int level) const { return log_q0 + level * log_scale; }
    int log_p() const { return log_aux > 0 ? log_aux : log_q(max_level) + 64; }
};

namespace detail {
struct CkksPayload;
}

/// Minimal leveled CKKS backend: power-of-two cyclotomic ring, NTT-CRT
/// big-integer polynomial products, canonical-embedding encode/decode with
/// sparse slot packing, public-key encryption, relinearization and Galois
/// rotation via auxiliary-modulus key switching, and explicit rescaling.
/// Exposes the same evaluation contracts as the exact simulator with a
/// looser (documented) error bound; deep circuits end in DepthExhausted
/// when the modulus chain is consumed.
class CkksContext final : public HeContext {
public:
    explicit CkksContext(CkksParams params);
    ~CkksContext() override;

    std::string name() const override { return "ckks"; }
    int max_level() const override { return params_.max_level; }
    const RotationSet& rotation_set() const override { return rotations_; }
    const CkksParams& params() const { return params_; }

    Ciphertext encrypt(const SlotVec& m) override;
    SlotVec decrypt(const Ciphertext& c) const override;

    Ciphertext add(const Ciphertext& a, const Ciphertext& b) const override;
    Ciphertext sub(const Ciphertext& a, const Ciphertext& b) const override;
    Ciphertext add_pt(const Ciphertext& a, const SlotVec& p) const override;
    Ciphertext mult_ct(const Ciphertext& a, const Ciphertext& b) const override;
    Ciphertext mult_pt(const Ciphertext& a, const SlotVec& p) const override;
    Ciphertext rotate_left(const Ciphertext& c, std::int64_t r) const override;

    /// Raw encode/decode (canonical embedding at the given level), exposed
    /// for the roundtrip contract tests.
    RingPoly encode(const SlotVec& m, int level) const;
    SlotVec decode(const RingPoly& p, int level, std::uint32_t slots) const;

    /// Ciphertext component bytes for determinism checks.
    std::vector<std::uint8_t> ciphertext_bytes(const Ciphertext& c) const;

private:
    struct Impl;
    CkksParams params_;
    RotationSet rotations_;
    std::unique_ptr<Impl> impl_;
};

/// Negacyclic product over the integers (schoolbook, arbitrary precision):
/// the correctness oracle for the NTT-CRT multiplication kernel.
std::vector<mpz_class> negacyclic_schoolbook(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b);

/// NTT-CRT negacyclic product; result coefficients are exact integers.
std::vector<mpz_class> negacyclic_ntt(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b);

}  // namespace fhenet::ckks
