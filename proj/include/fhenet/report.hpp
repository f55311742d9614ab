// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fhenet/cost_meter.hpp"
#include "fhenet/pipeline.hpp"

namespace fhenet::report {

struct BlockReport {
    std::string name;
    double mae_vs_exact = 0.0;  // paper-style: encrypted vs exact reference
    double mae_vs_poly = 0.0;   // encryption-only error: encrypted vs poly reference
    int levels_used = 0;
    CostSnapshot cost;
    double wall_s = 0.0;
};

struct Tolerances {
    double block_mae = 0.15;
    double poly_mae = 1e-4;  // applies with noise off and approximations on
    double min_r2 = 0.95;    // applies when >= 2 inputs reach the head
};

/// Per-block parity and cost summary over a batch of inputs. Serializes to
/// a stable JSON schema; wall-time fields are the only run-to-run variant.
struct ParityReport {
    std::string backend;
    std::string noise = "off";
    std::string rotsum = "tree";
    std::uint64_t seed = 0;
    int n_inputs = 0;
    bool bypass_activations = false;
    std::vector<BlockReport> blocks;
    double r2 = 1.0;
    bool r2_valid = false;
    Tolerances tol;
    bool passed = false;
    double total_wall_s = 0.0;

    std::string to_json() const;
    static ParityReport from_json(const std::string& text);
    void save(const std::string& path) const;

    /// Equality over everything except wall-time fields.
    bool same_modulo_time(const ParityReport& other) const;
};

/// Aggregate per-input encrypted runs against the two references. Costs and
/// level consumption come from the first run (they are circuit-determined);
/// MAE is averaged across inputs; R2 compares final outputs when available.
ParityReport assemble(const std::string& backend, const std::vector<pipeline::EncryptedRun>& runs,
                      const std::vector<ref::BlockTrace>& exact, const std::vector<ref::BlockTrace>& poly,
                      const Tolerances& tol);

}  // namespace fhenet::report
