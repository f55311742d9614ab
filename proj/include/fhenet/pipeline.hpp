// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fhenet/context.hpp"
#include "fhenet/layers.hpp"
#include "fhenet/reference.hpp"
#include "fhenet/weights.hpp"

namespace fhenet::pipeline {

struct RunOptions {
    RotSumMode rotsum = RotSumMode::kTree;
    Exec exec = Exec::kParallel;
    bool bypass_activations = false;
    /// Run only the first `blocks` of the 7 pipeline blocks (-1 = all).
    int blocks = -1;
};

struct BlockResult {
    std::string name;
    Tensor output;        // decrypted meaningful region (harness-side measurement)
    int level_in = 0;
    int level_out = 0;
    CostSnapshot cost;    // ops attributed to this block
    double wall_s = 0.0;
};

struct EncryptedRun {
    std::vector<BlockResult> blocks;
    double total_wall_s = 0.0;

    ref::BlockTrace trace() const;
};

/// Evaluate the pipeline on encrypted inputs, decrypting each block output
/// into the trace for parity measurement.
EncryptedRun run_encrypted(HeContext& ctx, const ModelWeights& w, const std::vector<Tensor>& frames,
                           const RunOptions& opt = {});

/// Pipeline block names in execution order.
std::vector<std::string> block_names(const ModelConfig& cfg);

/// Statically computed multiplicative depth per block (and in total), used
/// to size the level budget and to cross-check measured consumption.
struct DepthLedger {
    std::vector<std::pair<std::string, int>> per_block;
    int total = 0;
};
DepthLedger static_depth(const ModelConfig& cfg, bool bypass_activations = false);

/// Rotation amounts the full pipeline needs on cfg.slot_count-slot
/// ciphertexts; the keygen set is declared from this analysis.
std::vector<std::uint32_t> required_rotations(const ModelConfig& cfg);

/// Level budget for the configured circuit: config override or static
/// depth plus headroom.
int derive_max_level(const ModelConfig& cfg);

}  // namespace fhenet::pipeline
