// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "fhenet/ciphertext.hpp"
#include "fhenet/cost_meter.hpp"
#include "fhenet/errors.hpp"
#include "fhenet/slot_vec.hpp"

namespace fhenet {

enum class RotSumMode { kNaive, kTree };

inline RotSumMode rotsum_from_string(const std::string& s) {
    if (s == "naive") return RotSumMode::kNaive;
    if (s == "tree") return RotSumMode::kTree;
    throw ConfigError("unknown rotate-sum mode: " + s);
}

/// Declared rotation amounts. Keys cover exactly this set; rotating by an
/// uncovered amount (mod slot count) is a MissingKeyError.
class RotationSet {
public:
    RotationSet() = default;
    explicit RotationSet(std::vector<std::uint32_t> amounts) : amounts_(amounts.begin(), amounts.end()) {}

    static RotationSet all_below(std::uint32_t n) {
        std::vector<std::uint32_t> v(n);
        for (std::uint32_t i = 0; i < n; ++i) v[i] = i;
        return RotationSet(std::move(v));
    }

    bool covers(std::uint32_t amount) const { return amount == 0 || amounts_.count(amount) != 0; }
    const std::set<std::uint32_t>& amounts() const { return amounts_; }

private:
    std::set<std::uint32_t> amounts_;
};

/// Abstract FHE evaluation context: the SIMD slot computational model.
/// Higher layers (transforms, network blocks) are written against this
/// interface only, so the same circuit runs on the exact simulator or on
/// the CKKS backend.
///
/// Semantics shared by all backends:
///  - slot vectors are cyclic; rotate_left(c, r) puts slot (i+r) mod n at i
///  - every ct*ct or ct*pt multiply is followed by a rescale and consumes
///    one level; multiplying at level 0 raises DepthExhausted
///  - additions are free (no level cost)
class HeContext {
public:
    virtual ~HeContext() = default;

    virtual std::string name() const = 0;
    virtual int max_level() const = 0;
    virtual const RotationSet& rotation_set() const = 0;

    virtual Ciphertext encrypt(const SlotVec& m) = 0;
    virtual SlotVec decrypt(const Ciphertext& c) const = 0;

    virtual Ciphertext add(const Ciphertext& a, const Ciphertext& b) const = 0;
    virtual Ciphertext sub(const Ciphertext& a, const Ciphertext& b) const = 0;
    virtual Ciphertext add_pt(const Ciphertext& a, const SlotVec& p) const = 0;
    virtual Ciphertext mult_ct(const Ciphertext& a, const Ciphertext& b) const = 0;
    virtual Ciphertext mult_pt(const Ciphertext& a, const SlotVec& p) const = 0;
    virtual Ciphertext rotate_left(const Ciphertext& c, std::int64_t r) const = 0;

    Ciphertext add_scalar(const Ciphertext& a, double v) const { return add_pt(a, SlotVec::constant(a.slot_count(), v)); }
    Ciphertext mult_scalar(const Ciphertext& a, double v) const {
        return mult_pt(a, SlotVec::constant(a.slot_count(), v));
    }

    /// Sum of the first n_terms slots, delivered in slot 0 (other slots hold
    /// partial sums). Naive mode uses n_terms-1 rotations; tree mode
    /// log2(n_terms) rotations and requires n_terms to be a power of two.
    Ciphertext rotate_sum(const Ciphertext& c, std::uint32_t n_terms, RotSumMode mode) const;

    CostMeter& meter() const { return meter_; }

protected:
    mutable CostMeter meter_;
};

}  // namespace fhenet
