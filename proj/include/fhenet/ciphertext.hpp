// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>

namespace fhenet {

/// Backend-opaque encrypted state. Concrete payload types live with their
/// backend; the handle below never exposes slot values.
struct CipherPayload {
    virtual ~CipherPayload() = default;
};

/// Immutable handle to an encrypted slot vector. Carries only metadata:
/// slot count, remaining level budget, fixed-point scale, and an owner tag.
/// There is deliberately no per-slot accessor; decryption goes through the
/// owning context.
class Ciphertext {
public:
    Ciphertext() = default;

    Ciphertext(std::shared_ptr<const CipherPayload> payload, std::uint32_t slot_count, int level, double scale,
               std::uint64_t key_id, std::uint64_t lineage)
        : payload_(std::move(payload)),
          slot_count_(slot_count),
          level_(level),
          scale_(scale),
          key_id_(key_id),
          lineage_(lineage) {}

    std::uint32_t slot_count() const { return slot_count_; }
    int level() const { return level_; }
    double scale() const { return scale_; }
    std::uint64_t key_id() const { return key_id_; }

    /// Deterministic tag of the op history; drives reproducible noise
    /// sampling independent of evaluation order.
    std::uint64_t lineage() const { return lineage_; }

    bool valid() const { return payload_ != nullptr; }
    const CipherPayload& payload() const { return *payload_; }

private:
    std::shared_ptr<const CipherPayload> payload_;
    std::uint32_t slot_count_ = 0;
    int level_ = 0;
    double scale_ = 0.0;
    std::uint64_t key_id_ = 0;
    std::uint64_t lineage_ = 0;
};

/// splitmix64 step; used for lineage mixing and seeding.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(a ^ mix64(b)); }

}  // namespace fhenet
