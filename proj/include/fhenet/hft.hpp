// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "fhenet/context.hpp"
#include "fhenet/parallel.hpp"

namespace fhenet::hft {

enum class Direction { kForward, kInverse };

/// One sparse stage of the factored DFT: a set of (rotation amount,
/// diagonal) pairs. Applying a stage costs one multiplicative level and one
/// rotation per nonzero displacement.
struct DftStage {
    std::map<std::uint32_t, SlotVec> diagonals;  // displacement -> diagonal of slot_count entries
};

/// Radix-2 factorization of the unitary DFT matrix into log2(n) sparse
/// stages. The input permutation is folded into the first applied stage
/// (forward) or the last (inverse), so composing all stages equals the
/// dense unitary DFT / inverse-DFT matrix. A plan of transform size n may
/// be embedded in wider ciphertexts: data occupies slots [0, n), the rest
/// must be zero.
class DftPlan {
public:
    /// Build a plan for an n-point transform on slot_count-slot ciphertexts
    /// (slot_count == n for the plain case).
    static DftPlan build(std::uint32_t n, Direction dir);
    static DftPlan build_embedded(std::uint32_t n, std::uint32_t slot_count, Direction dir);

    std::uint32_t size() const { return n_; }
    std::uint32_t slot_count() const { return slot_count_; }
    Direction direction() const { return dir_; }
    std::uint32_t depth() const { return static_cast<std::uint32_t>(stages_.size()); }
    const std::vector<DftStage>& stages() const { return stages_; }

    /// Total rotation budget: sum over stages of nonzero displacements.
    std::uint32_t rotation_budget() const;

    /// Dense n x n composition of all stages (plaintext), for plan checks.
    std::vector<std::vector<cplx>> dense() const;

    /// Apply the plan to a plaintext vector (decrypted mirror of apply_hft).
    std::vector<cplx> apply_plain(const std::vector<cplx>& x) const;

    /// Baby-step/giant-step rotation grouping inside wide stages; off by
    /// default (paper-faithful rotation count first).
    bool use_bsgs = false;

private:
    std::uint32_t n_ = 0;
    std::uint32_t slot_count_ = 0;
    Direction dir_ = Direction::kForward;
    std::vector<DftStage> stages_;
};

/// Homomorphic Fourier transform: applies the factored plan to a
/// ciphertext, consuming exactly plan.depth() levels.
Ciphertext apply_hft(const HeContext& ctx, const Ciphertext& c, const DftPlan& plan);

/// A 2D image or feature map encrypted row-wise, one ciphertext per row.
/// row_len is the logical (meaningful) width; physical slot counts of the
/// row ciphertexts may be wider.
struct CipherGrid {
    std::vector<Ciphertext> rows;
    std::uint32_t row_len = 0;

    std::uint32_t n_rows() const { return static_cast<std::uint32_t>(rows.size()); }
    std::uint32_t slot_count() const { return rows.empty() ? 0 : rows[0].slot_count(); }
};

/// Per-row HFT over a grid; rows evaluate independently.
CipherGrid apply_hft(const HeContext& ctx, const CipherGrid& g, const DftPlan& plan, Exec exec = Exec::kSerial);

/// Mask-rotate-accumulate transpose of a row-packed grid. Output has
/// g.row_len rows and row_len' = next power of two >= g.n_rows(); costs
/// r*c plaintext mask multiplies and r*c - min(r,c) rotations, one level.
CipherGrid transpose_grid(const HeContext& ctx, const CipherGrid& g, Exec exec = Exec::kSerial);

/// Expected rotation count of transpose_grid for an r x c grid.
inline std::uint64_t transpose_rotation_count(std::uint64_t r, std::uint64_t c) { return r * c - std::min(r, c); }

// Grid <-> plaintext helpers (test and harness side).
CipherGrid encrypt_grid(HeContext& ctx, const std::vector<std::vector<double>>& m, std::uint32_t slot_count);
std::vector<std::vector<cplx>> decrypt_grid(const HeContext& ctx, const CipherGrid& g);

}  // namespace fhenet::hft
