// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <string>

namespace fhenet {

enum class OpKind : unsigned {
    kAdd = 0,
    kMultCt,
    kMultPt,
    kRotate,
    kRescale,
    kEncrypt,
    kDecrypt,
    kCount_,
};

inline const char* op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::kAdd: return "add";
        case OpKind::kMultCt: return "mult_ct";
        case OpKind::kMultPt: return "mult_pt";
        case OpKind::kRotate: return "rotate";
        case OpKind::kRescale: return "rescale";
        case OpKind::kEncrypt: return "encrypt";
        case OpKind::kDecrypt: return "decrypt";
        default: return "?";
    }
}

/// Plain value snapshot of the meter, used in reports and tests.
struct CostSnapshot {
    std::array<std::uint64_t, static_cast<std::size_t>(OpKind::kCount_)> counts{};
    int depth_used = 0;

    std::uint64_t count(OpKind k) const { return counts[static_cast<std::size_t>(k)]; }

    CostSnapshot operator-(const CostSnapshot& o) const {
        CostSnapshot d;
        for (std::size_t i = 0; i < counts.size(); ++i) d.counts[i] = counts[i] - o.counts[i];
        d.depth_used = depth_used;
        return d;
    }

    std::uint64_t total_mults_and_rotations() const {
        return count(OpKind::kMultCt) + count(OpKind::kMultPt) + count(OpKind::kRotate);
    }
};

/// Operation counter shared by every op of a backend context. Counters are
/// atomics so concurrent grid kernels can bump them; counts for a fixed
/// circuit are identical across runs and thread counts.
class CostMeter {
public:
    void bump(OpKind k) { counts_[static_cast<std::size_t>(k)].fetch_add(1, std::memory_order_relaxed); }

    /// Record the deepest level consumption seen so far (max_level - level).
    void note_depth(int consumed) {
        int cur = depth_used_.load(std::memory_order_relaxed);
        while (consumed > cur && !depth_used_.compare_exchange_weak(cur, consumed, std::memory_order_relaxed)) {
        }
    }

    std::uint64_t count(OpKind k) const { return counts_[static_cast<std::size_t>(k)].load(std::memory_order_relaxed); }
    int depth_used() const { return depth_used_.load(std::memory_order_relaxed); }

    CostSnapshot snapshot() const {
        CostSnapshot s;
        for (std::size_t i = 0; i < counts_.size(); ++i) s.counts[i] = counts_[i].load(std::memory_order_relaxed);
        s.depth_used = depth_used();
        return s;
    }

    void reset() {
        for (auto& c : counts_) c.store(0, std::memory_order_relaxed);
        depth_used_.store(0, std::memory_order_relaxed);
    }

private:
    std::array<std::atomic<std::uint64_t>, static_cast<std::size_t>(OpKind::kCount_)> counts_{};
    std::atomic<int> depth_used_{0};
};

}  // namespace fhenet
