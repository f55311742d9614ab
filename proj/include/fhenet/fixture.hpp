// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fhenet/weights.hpp"

namespace fhenet::fixture {

/// Deterministic random model weights for the given architecture, with
/// per-layer magnitude calibration over a batch of probe inputs:
///  - every activation's scale factor is set to the observed
///    max(|maxValue|, |minValue|) times a safety margin;
///  - layer weights are normalized so pre-activation magnitudes track the
///    per-layer targets (keeps the fixed-point range stable and the
///    comparison behavior reproducible);
///  - conv blocks get a shallow sign-comparison depth, the head a moderate
///    one, and the feature-extractor linear a deep one, reproducing the
///    reported error structure (conv and head blocks dominate the linear
///    blocks).
/// Extra probe inputs (typically the evaluation set itself, mirroring
/// calibration over training data) extend the observation batch; inputs
/// outside the calibrated range degrade accuracy.
ModelWeights gen_weights(std::uint64_t seed, ModelConfig arch,
                         const std::vector<std::vector<Tensor>>& extra_probes = {});

/// Deterministic input fixtures: `count` sets of frames with values in
/// [-1, 1].
std::vector<std::vector<Tensor>> gen_inputs(std::uint64_t seed, const ModelConfig& cfg, int count);

// Frame-set file format: a header line "frames rows cols" followed by
// frames*rows lines of cols whitespace-separated values.
void save_frames(const std::string& path, const std::vector<Tensor>& frames);
std::vector<Tensor> load_frames(const std::string& path);

/// Writes weights.json and inputs/input_XXX.txt under dir; byte-identical
/// for identical seeds.
struct GenResult {
    std::string weights_path;
    std::vector<std::string> input_paths;
};
GenResult generate(const std::string& dir, std::uint64_t seed, const std::string& arch, int n_inputs);

}  // namespace fhenet::fixture
