// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "fhenet/context.hpp"

namespace fhenet {

/// Per-slot Gaussian perturbation injected after the named ops, emulating
/// CKKS approximation error on the exact simulator. Off by default; the
/// preset reproduces encrypted-evaluation-scale degradation.
struct NoiseModel {
    bool enabled = false;
    double sigma_mult = 0.0;
    double sigma_rot = 0.0;
    double sigma_rescale = 0.0;
    std::uint64_t rng_seed = 0;

    static NoiseModel off() { return {}; }
    static NoiseModel preset(std::uint64_t seed = 1) {
        NoiseModel n;
        n.enabled = true;
        n.sigma_mult = 1e-4;
        n.sigma_rot = 1e-5;
        n.sigma_rescale = 0.0;
        n.rng_seed = seed;
        return n;
    }
};

struct SimParams {
    std::uint64_t seed = 0;
    int max_level = 40;
    double scale = 1073741824.0;  // 2^30 fixed-point scale exponent
    RotationSet rotations;        // declared up front from circuit analysis
    NoiseModel noise;
};

namespace detail {
struct SimPayload final : CipherPayload {
    std::vector<cplx> values;
};
}  // namespace detail

/// Exact slot-level simulator of the FHE computational model. Ciphertext
/// payload is the exact complex slot vector behind an opaque wrapper;
/// levels, scales, rotation-key coverage and op costs follow the leveled
/// CKKS contract. With noise disabled arithmetic is exact to floating
/// point, so circuit outputs are bit-reproducible parity oracles.
class SimContext final : public HeContext {
public:
    explicit SimContext(SimParams params);

    std::string name() const override { return "simulator"; }
    int max_level() const override { return params_.max_level; }
    const RotationSet& rotation_set() const override { return params_.rotations; }
    const SimParams& params() const { return params_; }
    std::uint64_t key_id() const { return key_id_; }

    Ciphertext encrypt(const SlotVec& m) override;
    SlotVec decrypt(const Ciphertext& c) const override;

    Ciphertext add(const Ciphertext& a, const Ciphertext& b) const override;
    Ciphertext sub(const Ciphertext& a, const Ciphertext& b) const override;
    Ciphertext add_pt(const Ciphertext& a, const SlotVec& p) const override;
    Ciphertext mult_ct(const Ciphertext& a, const Ciphertext& b) const override;
    Ciphertext mult_pt(const Ciphertext& a, const SlotVec& p) const override;
    Ciphertext rotate_left(const Ciphertext& c, std::int64_t r) const override;

private:
    Ciphertext wrap(std::vector<cplx> values, int level, std::uint64_t lineage) const;
    void add_noise(std::vector<cplx>& v, double sigma, std::uint64_t lineage) const;
    const detail::SimPayload& unwrap(const Ciphertext& c, const char* op) const;

    SimParams params_;
    std::uint64_t key_id_;
    std::atomic<std::uint64_t> encrypt_counter_{0};
};

/// Convenience context for tests: all rotation amounts below `slots`
/// provisioned, generous level budget.
SimContext make_test_sim(std::uint32_t slots, int max_level = 64, std::uint64_t seed = 0);

}  // namespace fhenet
