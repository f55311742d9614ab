// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#include "fhenet/simulator.hpp"

#include <cmath>

namespace fhenet {

namespace {

constexpr std::uint64_t kOpAdd = 0x61646400;
constexpr std::uint64_t kOpSub = 0x73756200;
constexpr std::uint64_t kOpAddPt = 0x61707400;
constexpr std::uint64_t kOpMultCt = 0x6d637400;
constexpr std::uint64_t kOpMultPt = 0x6d707400;
constexpr std::uint64_t kOpRotate = 0x726f7400;

// Deterministic standard normal from a counter stream (Box-Muller over
// splitmix64 outputs); avoids the implementation-defined std distributions.
class GaussStream {
public:
    explicit GaussStream(std::uint64_t seed) : state_(seed) {}
    double next(double sigma) {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    double uniform01() {
        state_ = mix64(state_);
        return static_cast<double>(state_ >> 11) * 0x1.0p-53;
    }
    std::uint64_t state_;
};

}  // namespace

SimContext::SimContext(SimParams params) : params_(std::move(params)), key_id_(mix64(params_.seed, 0x6b657973)) {
    if (params_.max_level < 1) throw ConfigError("simulator: max_level must be >= 1");
    if (params_.scale <= 0.0) throw ScaleError("simulator: scale must be positive");
}

const detail::SimPayload& SimContext::unwrap(const Ciphertext& c, const char* op) const {
    if (!c.valid()) throw KeyError(std::string(op) + ": empty ciphertext");
    if (c.key_id() != key_id_) throw KeyError(std::string(op) + ": ciphertext from different keys");
    return static_cast<const detail::SimPayload&>(c.payload());
}

Ciphertext SimContext::wrap(std::vector<cplx> values, int level, std::uint64_t lineage) const {
    auto p = std::make_shared<detail::SimPayload>();
    p->values = std::move(values);
    auto slots = static_cast<std::uint32_t>(p->values.size());
    meter_.note_depth(params_.max_level - level);
    return Ciphertext(std::move(p), slots, level, params_.scale, key_id_, lineage);
}

void SimContext::add_noise(std::vector<cplx>& v, double sigma, std::uint64_t lineage) const {
    if (!params_.noise.enabled || sigma <= 0.0) return;
    GaussStream g(mix64(params_.noise.rng_seed, lineage));
    for (auto& z : v) z += cplx(g.next(sigma), g.next(sigma));
}

Ciphertext SimContext::encrypt(const SlotVec& m) {
    meter_.bump(OpKind::kEncrypt);
    std::uint64_t idx = encrypt_counter_.fetch_add(1, std::memory_order_relaxed);
    std::uint64_t lineage = mix64(mix64(params_.seed, 0x656e63), idx);
    return wrap(m.data(), params_.max_level, lineage);
}

SlotVec SimContext::decrypt(const Ciphertext& c) const {
    const auto& p = unwrap(c, "decrypt");
    meter_.bump(OpKind::kDecrypt);
    return SlotVec(p.values);
}

Ciphertext SimContext::add(const Ciphertext& a, const Ciphertext& b) const {
    const auto& pa = unwrap(a, "add");
    const auto& pb = unwrap(b, "add");
    if (a.slot_count() != b.slot_count()) throw ShapeError("add: slot_count mismatch");
    if (a.scale() != b.scale()) throw ScaleError("add: scale mismatch");
    std::vector<cplx> out(pa.values);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += pb.values[i];
    meter_.bump(OpKind::kAdd);
    return wrap(std::move(out), std::min(a.level(), b.level()), mix64(mix64(kOpAdd, a.lineage()), b.lineage()));
}

Ciphertext SimContext::sub(const Ciphertext& a, const Ciphertext& b) const {
    const auto& pa = unwrap(a, "sub");
    const auto& pb = unwrap(b, "sub");
    if (a.slot_count() != b.slot_count()) throw ShapeError("sub: slot_count mismatch");
    if (a.scale() != b.scale()) throw ScaleError("sub: scale mismatch");
    std::vector<cplx> out(pa.values);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= pb.values[i];
    meter_.bump(OpKind::kAdd);
    return wrap(std::move(out), std::min(a.level(), b.level()), mix64(mix64(kOpSub, a.lineage()), b.lineage()));
}

Ciphertext SimContext::add_pt(const Ciphertext& a, const SlotVec& p) const {
    const auto& pa = unwrap(a, "add_pt");
    if (a.slot_count() != p.size()) throw ShapeError("add_pt: slot_count mismatch");
    std::vector<cplx> out(pa.values);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += p[i];
    meter_.bump(OpKind::kAdd);
    return wrap(std::move(out), a.level(), mix64(kOpAddPt, a.lineage()));
}

Ciphertext SimContext::mult_ct(const Ciphertext& a, const Ciphertext& b) const {
    const auto& pa = unwrap(a, "mult_ct");
    const auto& pb = unwrap(b, "mult_ct");
    if (a.slot_count() != b.slot_count()) throw ShapeError("mult_ct: slot_count mismatch");
    int level = std::min(a.level(), b.level());
    if (level < 1) throw DepthExhausted("mult_ct: level budget exhausted");
    std::vector<cplx> out(pa.values);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= pb.values[i];
    std::uint64_t lineage = mix64(mix64(kOpMultCt, a.lineage()), b.lineage());
    add_noise(out, params_.noise.sigma_mult, lineage);
    add_noise(out, params_.noise.sigma_rescale, mix64(lineage, 1));
    meter_.bump(OpKind::kMultCt);
    meter_.bump(OpKind::kRescale);
    return wrap(std::move(out), level - 1, lineage);
}

Ciphertext SimContext::mult_pt(const Ciphertext& a, const SlotVec& p) const {
    const auto& pa = unwrap(a, "mult_pt");
    if (a.slot_count() != p.size()) throw ShapeError("mult_pt: slot_count mismatch");
    if (a.level() < 1) throw DepthExhausted("mult_pt: level budget exhausted");
    std::vector<cplx> out(pa.values);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= p[i];
    std::uint64_t lineage = mix64(kOpMultPt, a.lineage());
    add_noise(out, params_.noise.sigma_mult, lineage);
    add_noise(out, params_.noise.sigma_rescale, mix64(lineage, 1));
    meter_.bump(OpKind::kMultPt);
    meter_.bump(OpKind::kRescale);
    return wrap(std::move(out), a.level() - 1, lineage);
}

Ciphertext SimContext::rotate_left(const Ciphertext& c, std::int64_t r) const {
    const auto& pc = unwrap(c, "rotate_left");
    const auto n = static_cast<std::int64_t>(c.slot_count());
    std::uint32_t amount = static_cast<std::uint32_t>(((r % n) + n) % n);
    if (amount == 0) return c;
    if (!params_.rotations.covers(amount))
        throw MissingKeyError("rotate_left: no rotation key for amount " + std::to_string(amount));
    std::vector<cplx> out(pc.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pc.values[(i + amount) % out.size()];
    std::uint64_t lineage = mix64(mix64(kOpRotate, c.lineage()), amount);
    add_noise(out, params_.noise.sigma_rot, lineage);
    meter_.bump(OpKind::kRotate);
    return wrap(std::move(out), c.level(), lineage);
}

Ciphertext HeContext::rotate_sum(const Ciphertext& c, std::uint32_t n_terms, RotSumMode mode) const {
    if (n_terms > c.slot_count()) throw ShapeError("rotate_sum: n_terms exceeds slot_count");
    if (n_terms <= 1) return c;
    if (mode == RotSumMode::kNaive) {
        Ciphertext acc = c;
        for (std::uint32_t i = 1; i < n_terms; ++i) acc = add(acc, rotate_left(c, i));
        return acc;
    }
    if (!is_power_of_two(n_terms)) throw ShapeError("rotate_sum: tree mode requires power-of-two n_terms");
    Ciphertext acc = c;
    for (std::uint32_t h = n_terms / 2; h >= 1; h /= 2) acc = add(acc, rotate_left(acc, h));
    return acc;
}

SimContext make_test_sim(std::uint32_t slots, int max_level, std::uint64_t seed) {
    SimParams p;
    p.seed = seed;
    p.max_level = max_level;
    p.rotations = RotationSet::all_below(slots);
    return SimContext(std::move(p));
}

}  // namespace fhenet
