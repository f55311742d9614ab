// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#include "fhenet/reference.hpp"

#include <cmath>
#include <functional>

namespace fhenet::ref {

const Tensor& BlockTrace::block(const std::string& name) const {
    for (const auto& [n, t] : blocks)
        if (n == name) return t;
    throw ConfigError("BlockTrace: no block named " + name);
}

namespace {

using ActFn = std::function<double(double, const ActivationSpec&)>;

Tensor concat_frames(const ModelWeights& w, const std::vector<Tensor>& frames) {
    const auto& c = w.config;
    if (frames.size() != c.frames) throw ShapeError("forward: frame count mismatch");
    Tensor img = Tensor::zeros({1, c.image_h(), c.image_w()});
    for (std::uint32_t f = 0; f < c.frames; ++f) {
        if (frames[f].shape != std::vector<std::size_t>{c.frame_h, c.frame_w})
            throw ShapeError("forward: frame shape mismatch");
        for (std::uint32_t r = 0; r < c.frame_h; ++r)
            for (std::uint32_t col = 0; col < c.frame_w; ++col)
                img.data[r * c.image_w() + f * c.frame_w + col] = frames[f].data[r * c.frame_w + col];
    }
    return img;
}

// Valid cross-correlation with stride, multi-channel.
Tensor conv_block(const Tensor& in, const ConvLayer& l, const Tensor& filter, const Tensor& bias) {
    const std::size_t in_c = in.shape[0], h = in.shape[1], w = in.shape[2];
    if (in_c != l.in_channels) throw ShapeError(l.name + ": channel mismatch");
    const std::size_t vh = h - l.kh + 1, vw = w - l.kw + 1;
    const std::size_t oh = (vh - 1) / l.stride + 1, ow = (vw - 1) / l.stride + 1;
    Tensor out = Tensor::zeros({l.out_channels, oh, ow});
    for (std::size_t oc = 0; oc < l.out_channels; ++oc) {
        for (std::size_t r = 0; r < oh; ++r) {
            for (std::size_t cidx = 0; cidx < ow; ++cidx) {
                double acc = bias.data[oc];
                const std::size_t r0 = r * l.stride, c0 = cidx * l.stride;
                for (std::size_t ic = 0; ic < in_c; ++ic)
                    for (std::size_t p = 0; p < l.kh; ++p)
                        for (std::size_t q = 0; q < l.kw; ++q)
                            acc += filter.data[((oc * in_c + ic) * l.kh + p) * l.kw + q] *
                                   in.data[(ic * h + r0 + p) * w + c0 + q];
                out.data[(oc * oh + r) * ow + cidx] = acc;
            }
        }
    }
    return out;
}

Tensor dense_block(const Tensor& in, const Tensor& weight, const Tensor& bias) {
    const std::size_t out_d = weight.shape[0], in_d = weight.shape[1];
    if (in.size() != in_d) throw ShapeError("dense: input size mismatch");
    Tensor out = Tensor::zeros({out_d});
    for (std::size_t j = 0; j < out_d; ++j) {
        double acc = bias.data[j];
        for (std::size_t i = 0; i < in_d; ++i) acc += weight.data[j * in_d + i] * in.data[i];
        out.data[j] = acc;
    }
    return out;
}

void activate(Tensor& t, const ActivationSpec& spec, const ActFn& act) {
    for (auto& v : t.data) v = act(v, spec);
}

BlockTrace forward_impl(const ModelWeights& w, const std::vector<Tensor>& frames, const ActFn& act,
                        bool bypass_activations) {
    const auto& cfg = w.config;
    BlockTrace trace;
    Tensor cur = concat_frames(w, frames);
    for (const auto& l : cfg.conv) {
        cur = conv_block(cur, l, w.tensor(l.name + ".filter"), w.tensor(l.name + ".bias"));
        if (!bypass_activations) activate(cur, cfg.activation(l), act);
        trace.blocks.emplace_back(l.name, cur);
    }
    Tensor flat(std::vector<std::size_t>{cur.size()}, cur.data);
    for (const auto& l : cfg.linear) {
        flat = dense_block(flat, w.tensor(l.name + ".weight"), w.tensor(l.name + ".bias"));
        if (!bypass_activations) activate(flat, cfg.activation(l), act);
        trace.blocks.emplace_back(l.name, flat);
    }
    for (const auto& l : cfg.head) {
        flat = dense_block(flat, w.tensor(l.name + ".weight"), w.tensor(l.name + ".bias"));
        if (!bypass_activations) activate(flat, cfg.activation(l), act);
    }
    trace.blocks.emplace_back("head", flat);
    return trace;
}

}  // namespace

BlockTrace forward_exact(const ModelWeights& w, const std::vector<Tensor>& frames, bool bypass_activations) {
    return forward_impl(w, frames, [](double x, const ActivationSpec& s) { return apply_activation_exact(x, s); },
                        bypass_activations);
}

BlockTrace forward_poly(const ModelWeights& w, const std::vector<Tensor>& frames, bool bypass_activations) {
    return forward_impl(w, frames, [](double x, const ActivationSpec& s) { return apply_activation_plain(x, s); },
                        bypass_activations);
}

double mae(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw ShapeError("mae: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

std::vector<std::pair<std::string, double>> mae(const BlockTrace& a, const BlockTrace& b) {
    if (a.blocks.size() != b.blocks.size()) throw ShapeError("mae: trace block count mismatch");
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        if (a.blocks[i].first != b.blocks[i].first) throw ShapeError("mae: block name mismatch");
        if (a.blocks[i].second.shape != b.blocks[i].second.shape) throw ShapeError("mae: block shape mismatch");
        out.emplace_back(a.blocks[i].first, mae(a.blocks[i].second.data, b.blocks[i].second.data));
    }
    return out;
}

double r_squared(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size() || pred.empty()) throw ShapeError("r_squared: size mismatch");
    double mean = 0.0;
    for (double v : truth) mean += v;
    mean /= static_cast<double>(truth.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

}  // namespace fhenet::ref
