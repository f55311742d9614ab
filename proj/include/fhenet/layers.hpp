// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "fhenet/context.hpp"
#include "fhenet/hft.hpp"
#include "fhenet/weights.hpp"

namespace fhenet::layers {

using hft::CipherGrid;

/// Pack three camera frames into one row-per-ciphertext grid: rows are the
/// horizontal concatenation of the frames, zero-padded to the slot width.
CipherGrid pack_input(HeContext& ctx, const std::vector<Tensor>& frames, const ModelConfig& cfg);

/// Read the meaningful region of a packed/conv grid back to a tensor
/// (harness side; needs the secret key via ctx).
Tensor unpack_grid(const HeContext& ctx, const CipherGrid& g);

/// Degree <= 9 polynomial on a ciphertext, Paterson-Stockmeyer style power
/// cache, depth ceil(log2(deg+1)) = 4 levels at degree 8..9. Coefficients
/// are monomial, index = power.
Ciphertext eval_poly(const HeContext& ctx, const Ciphertext& x, std::span<const double> coeffs);

/// Composite sign approximation on [-1, 1]: d applications of the g
/// polynomial then d of the f polynomial, 8d levels.
Ciphertext compg_sign(const HeContext& ctx, const Ciphertext& x, int d);

/// ReLU via scaled comparison-against-zero: normalize by the calibrated
/// magnitude bound, map the approximate sign to a 0/1 step, multiply by the
/// scaled input, and restore the range.
Ciphertext relu_approx(const HeContext& ctx, const Ciphertext& c, const ActivationSpec& spec);

/// Degree-8 polynomial tanh on [-2, 2] (inputs wider than 2 are first
/// scaled down by 2/scale_factor).
Ciphertext tanh_poly(const HeContext& ctx, const Ciphertext& c, const ActivationSpec& spec);

Ciphertext apply_activation(const HeContext& ctx, const Ciphertext& c, const ActivationSpec& spec);
CipherGrid apply_activation(const HeContext& ctx, const CipherGrid& g, const ActivationSpec& spec,
                            Exec exec = Exec::kSerial);

/// Stride-1 frequency-domain 2D convolution (cross-correlation convention,
/// matching the plaintext reference) over per-channel grids, plus bias.
/// Filter spectra are computed in plaintext with the fast transform; the
/// encrypted side runs row HFT, transpose, column HFT, a pointwise spectral
/// multiply, and the inverse chain. In-channel spectra are summed per out
/// channel before the single inverse transform.
/// The returned grids hold the raw circular result; valid outputs sit at
/// rows/cols offset kh-1 / kw-1.
std::vector<CipherGrid> conv2d_freq(const HeContext& ctx, const std::vector<CipherGrid>& in, const ConvLayer& layer,
                                    const Tensor& filter, const Tensor& bias, Exec exec = Exec::kSerial);

/// Stride extraction and realignment after conv2d_freq: keeps every
/// stride-th valid output, compacts it to slot 0 of row 0 onward via the
/// 0/1 mask and per-displacement rotations; row selection is free list
/// reindexing. Non-selected slots decrypt to zero.
struct StrideSpec {
    std::uint32_t stride = 1;
    std::uint32_t pad = 0;  // realignment offset: first valid column/row (filter size - 1)
    std::uint32_t valid_h = 0;
    std::uint32_t valid_w = 0;
};
CipherGrid apply_stride(const HeContext& ctx, const CipherGrid& g, const StrideSpec& spec, Exec exec = Exec::kSerial);

/// Fused flatten + dense layer over per-channel grids: multiply each row
/// ciphertext by its weight slice, accumulate, rotate-sum, and deposit each
/// neuron's value into its output slot. Features are ordered channel-major,
/// then row, then column. w is [out, features]; slots >= out decrypt to 0.
Ciphertext flatten_dense(const HeContext& ctx, const std::vector<CipherGrid>& in, const Tensor& w, const Tensor& b,
                         RotSumMode mode, Exec exec = Exec::kSerial);

/// Dense layer on a single ciphertext holding in_dim meaningful slots:
/// per-row weight multiply, rotate-sum, unit-mask isolation into slot j.
Ciphertext dense(const HeContext& ctx, const Ciphertext& c, const Tensor& w, const Tensor& b, RotSumMode mode,
                 Exec exec = Exec::kSerial);

/// The 3-layer MLP replacing the sampling library: maps the 64-dim latent
/// ciphertext to the regression output in slot 0.
Ciphertext action_head(const HeContext& ctx, const Ciphertext& latent, const ModelWeights& w, RotSumMode mode,
                       bool bypass_activations = false, Exec exec = Exec::kSerial);

}  // namespace fhenet::layers
