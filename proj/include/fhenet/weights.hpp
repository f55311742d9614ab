// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fhenet/errors.hpp"

namespace fhenet {

/// Row-major numeric tensor.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        std::size_t n = 1;
        for (auto v : shape) n *= v;
        if (n != data.size()) throw ShapeError("Tensor: shape/data mismatch");
    }
    static Tensor zeros(std::vector<std::size_t> s) {
        std::size_t n = 1;
        for (auto v : s) n *= v;
        return Tensor(std::move(s), std::vector<double>(n, 0.0));
    }
    std::size_t size() const { return data.size(); }
    double& at(std::size_t i) { return data[i]; }
    double at(std::size_t i) const { return data[i]; }
};

enum class ActKind { kReluCompG, kTanhPoly8, kIdentity };

ActKind act_from_string(const std::string& s);
std::string act_to_string(ActKind k);

/// Per-layer activation description: the approximation kind, the observed
/// magnitude bound used for normalization, and the composite-sign /
/// polynomial parameters.
struct ActivationSpec {
    ActKind kind = ActKind::kIdentity;
    double scale_factor = 1.0;            // max(|maxValue|, |minValue|) from calibration
    int compg_depth = 3;                  // composition count d (g applied d times, then f d times)
    std::array<double, 9> tanh_coeffs{};  // degree-8 polynomial, monomial basis
};

struct ConvLayer {
    std::string name;
    std::uint32_t in_channels = 1;
    std::uint32_t out_channels = 1;
    std::uint32_t kh = 3, kw = 3;
    std::uint32_t stride = 1;
    ActKind act = ActKind::kReluCompG;
    double act_scale = 1.0;
    int compg = 0;  // per-layer composition count; 0 = config default
};

struct DenseLayer {
    std::string name;
    std::uint32_t in = 0, out = 0;
    ActKind act = ActKind::kIdentity;
    double act_scale = 1.0;
    int compg = 0;
};

/// Architecture description: three conv blocks, three linear blocks (the
/// last one emits the 64-dim latent), and the 3-layer action head mapping
/// the latent to the regression output.
struct ModelConfig {
    std::uint32_t frames = 3;
    std::uint32_t frame_h = 50;
    std::uint32_t frame_w = 50;
    std::uint32_t slot_count = 256;
    int max_level = 0;  // 0 = derive from static depth analysis at load
    int compg_depth = 3;
    double compg_band = 0.01;  // relative dead zone of the sign approximation
    std::array<double, 9> tanh_coeffs{};
    std::vector<ConvLayer> conv;
    std::vector<DenseLayer> linear;
    std::vector<DenseLayer> head;

    std::uint32_t image_h() const { return frame_h; }
    std::uint32_t image_w() const { return frame_w * frames; }

    ActivationSpec activation(const ConvLayer& l) const { return make_spec(l.act, l.act_scale, l.compg); }
    ActivationSpec activation(const DenseLayer& l) const { return make_spec(l.act, l.act_scale, l.compg); }

    /// Spatial output dims of each conv block after its stride step.
    struct BlockDims {
        std::uint32_t h, w;
    };
    std::vector<BlockDims> conv_output_dims() const;
    std::uint32_t flatten_features() const;

private:
    ActivationSpec make_spec(ActKind k, double s, int layer_compg) const {
        ActivationSpec a;
        a.kind = k;
        a.scale_factor = s;
        a.compg_depth = layer_compg > 0 ? layer_compg : compg_depth;
        a.tanh_coeffs = tanh_coeffs;
        return a;
    }
};

/// Named tensors plus the architecture config; the on-disk form is a single
/// JSON document with "config" and "tensors" objects.
struct ModelWeights {
    ModelConfig config;
    std::map<std::string, Tensor> tensors;

    const Tensor& tensor(const std::string& name) const;
    void validate() const;

    static ModelWeights load(const std::string& path);
    void save(const std::string& path) const;
    std::string to_json() const;
    static ModelWeights from_json(const std::string& text);
};

/// Default architecture: 50x50x3 frames, conv channels 1-8-16-64 with
/// stride 2, linear blocks to the 64-dim latent, 64-64-1 head.
ModelConfig default_config();

/// Smaller architecture for quick runs: 16x16 frames, conv channels
/// 1-4-8-16, same block structure and latent width.
ModelConfig small_config();

// --- activation math (shared by the encrypted path and the reference) ---

/// Composite sign approximation on [-1, 1]: g-polynomial applied d times,
/// then f-polynomial d times. Both are fixed odd degree-9 polynomials.
double compg_sign_plain(double x, int d);

/// Odd degree-9 coefficient tables of the f/g composite-sign family
/// (monomial basis, index = power).
std::span<const double> compg_f_coeffs();
std::span<const double> compg_g_coeffs();

/// Degree <= 9 polynomial evaluated with the same power-cache association
/// the encrypted evaluator uses, so plaintext and encrypted results agree
/// to floating-point roundoff.
double poly_eval_powerform(std::span<const double> coeffs, double x);

double relu_compg_plain(double x, const ActivationSpec& spec);
double tanh_poly_plain(double x, const ActivationSpec& spec);
double apply_activation_plain(double x, const ActivationSpec& spec);
double apply_activation_exact(double x, const ActivationSpec& spec);

/// Degree-8 odd polynomial fit of tanh on [-2, 2] (Remez exchange on the
/// odd-power basis). Returns monomial coefficients; even entries are zero.
std::array<double, 9> fit_tanh_poly8();

}  // namespace fhenet
