// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fhenet/weights.hpp"

namespace fhenet::ref {

/// Ordered per-block outputs of one forward pass: conv1..conv3,
/// linear1..linear3, head.
struct BlockTrace {
    std::vector<std::pair<std::string, Tensor>> blocks;

    const Tensor& output() const { return blocks.back().second; }
    const Tensor& block(const std::string& name) const;
};

/// Plaintext pipeline with true ReLU/tanh and direct spatial convolution.
/// This is the parity oracle; it shares no code with the spectral path.
BlockTrace forward_exact(const ModelWeights& w, const std::vector<Tensor>& frames, bool bypass_activations = false);

/// Same pipeline with the polynomial activation approximations substituted,
/// isolating encrypted-evaluation error from approximation error.
BlockTrace forward_poly(const ModelWeights& w, const std::vector<Tensor>& frames, bool bypass_activations = false);

/// Per-block mean absolute error between two traces with identical block
/// lists and shapes.
std::vector<std::pair<std::string, double>> mae(const BlockTrace& a, const BlockTrace& b);

double mae(std::span<const double> a, std::span<const double> b);

/// Coefficient of determination of pred against truth.
double r_squared(std::span<const double> pred, std::span<const double> truth);

}  // namespace fhenet::ref
