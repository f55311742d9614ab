// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#include "fhenet/layers.hpp"

#include <algorithm>
#include <map>

#include "fhenet/dft.hpp"

namespace fhenet::layers {

CipherGrid pack_input(HeContext& ctx, const std::vector<Tensor>& frames, const ModelConfig& cfg) {
    if (frames.size() != cfg.frames) throw ShapeError("pack_input: expected " + std::to_string(cfg.frames) + " frames");
    for (const auto& f : frames)
        if (f.shape != std::vector<std::size_t>{cfg.frame_h, cfg.frame_w})
            throw ShapeError("pack_input: frame shape mismatch");
    const std::uint32_t w = cfg.frame_w;
    if (cfg.image_w() > cfg.slot_count) throw ShapeError("pack_input: concatenated row wider than slot count");

    CipherGrid g;
    g.row_len = cfg.image_w();
    for (std::uint32_t r = 0; r < cfg.frame_h; ++r) {
        SlotVec row(cfg.slot_count);
        for (std::uint32_t f = 0; f < cfg.frames; ++f)
            for (std::uint32_t c = 0; c < w; ++c) row[f * w + c] = cplx(frames[f].data[r * w + c], 0.0);
        g.rows.push_back(ctx.encrypt(row));
    }
    return g;
}

Tensor unpack_grid(const HeContext& ctx, const CipherGrid& g) {
    Tensor t = Tensor::zeros({g.n_rows(), g.row_len});
    for (std::uint32_t r = 0; r < g.n_rows(); ++r) {
        SlotVec row = ctx.decrypt(g.rows[r]);
        for (std::uint32_t c = 0; c < g.row_len; ++c) t.data[r * g.row_len + c] = row[c].real();
    }
    return t;
}

Ciphertext eval_poly(const HeContext& ctx, const Ciphertext& x, std::span<const double> coeffs) {
    if (coeffs.size() > 10) throw ShapeError("eval_poly: degree > 9 unsupported");
    const std::uint32_t n = x.slot_count();

    // Power cache, built on demand: p2=x*x, p3=x*p2, p4=p2*p2, p6=p2*p4,
    // p8=p4*p4. Odd terms are (c_k*x)*p_{k-1}; even terms c_k*p_k.
    Ciphertext p2, p3, p4, p6, p8;
    auto need_p2 = [&]() { if (!p2.valid()) p2 = ctx.mult_ct(x, x); return p2; };
    auto need_p4 = [&]() { if (!p4.valid()) { need_p2(); p4 = ctx.mult_ct(p2, p2); } return p4; };
    auto power = [&](std::size_t k) -> Ciphertext {
        switch (k) {
            case 2: return need_p2();
            case 3: if (!p3.valid()) p3 = ctx.mult_ct(x, need_p2()); return p3;
            case 4: return need_p4();
            case 6: if (!p6.valid()) p6 = ctx.mult_ct(need_p2(), need_p4()); return p6;
            case 8: if (!p8.valid()) p8 = ctx.mult_ct(need_p4(), need_p4()); return p8;
            default: throw ShapeError("eval_poly: unsupported power");
        }
    };

    Ciphertext acc;
    auto accumulate = [&](const Ciphertext& t) { acc = acc.valid() ? ctx.add(acc, t) : t; };
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0.0) continue;
        if (k % 2 == 1) {
            Ciphertext base = ctx.mult_pt(x, SlotVec::constant(n, coeffs[k]));
            accumulate(k == 1 ? base : ctx.mult_ct(base, power(k - 1)));
        } else {
            accumulate(ctx.mult_pt(power(k), SlotVec::constant(n, coeffs[k])));
        }
    }
    if (!acc.valid()) acc = ctx.mult_scalar(x, 0.0);
    if (!coeffs.empty() && coeffs[0] != 0.0) acc = ctx.add_scalar(acc, coeffs[0]);
    return acc;
}

Ciphertext compg_sign(const HeContext& ctx, const Ciphertext& x, int d) {
    Ciphertext y = x;
    for (int i = 0; i < d; ++i) y = eval_poly(ctx, y, compg_g_coeffs());
    for (int i = 0; i < d; ++i) y = eval_poly(ctx, y, compg_f_coeffs());
    return y;
}

Ciphertext relu_approx(const HeContext& ctx, const Ciphertext& c, const ActivationSpec& spec) {
    const double s = spec.scale_factor;
    Ciphertext scaled = ctx.mult_scalar(c, 1.0 / s);
    Ciphertext sgn = compg_sign(ctx, scaled, spec.compg_depth);
    Ciphertext step = ctx.add_scalar(ctx.mult_scalar(sgn, 0.5), 0.5);
    return ctx.mult_scalar(ctx.mult_ct(step, scaled), s);
}

Ciphertext tanh_poly(const HeContext& ctx, const Ciphertext& c, const ActivationSpec& spec) {
    Ciphertext t = spec.scale_factor > 2.0 ? ctx.mult_scalar(c, 2.0 / spec.scale_factor) : c;
    return eval_poly(ctx, t, {spec.tanh_coeffs.data(), spec.tanh_coeffs.size()});
}

Ciphertext apply_activation(const HeContext& ctx, const Ciphertext& c, const ActivationSpec& spec) {
    switch (spec.kind) {
        case ActKind::kReluCompG: return relu_approx(ctx, c, spec);
        case ActKind::kTanhPoly8: return tanh_poly(ctx, c, spec);
        case ActKind::kIdentity: return c;
    }
    return c;
}

CipherGrid apply_activation(const HeContext& ctx, const CipherGrid& g, const ActivationSpec& spec, Exec exec) {
    CipherGrid out;
    out.row_len = g.row_len;
    out.rows.resize(g.rows.size());
    parallel_for(g.rows.size(), exec, [&](std::size_t i) { out.rows[i] = apply_activation(ctx, g.rows[i], spec); });
    return out;
}

std::vector<CipherGrid> conv2d_freq(const HeContext& ctx, const std::vector<CipherGrid>& in, const ConvLayer& layer,
                                    const Tensor& filter, const Tensor& bias, Exec exec) {
    if (in.size() != layer.in_channels) throw ShapeError(layer.name + ": channel count mismatch");
    if (filter.shape != std::vector<std::size_t>{layer.out_channels, layer.in_channels, layer.kh, layer.kw})
        throw ShapeError(layer.name + ": filter shape mismatch");
    const std::uint32_t n_slots = in[0].slot_count();
    const std::uint32_t img_h = in[0].n_rows();
    const std::uint32_t img_w = in[0].row_len;
    if (layer.kw > img_w || layer.kh > img_h) throw ShapeError(layer.name + ": filter larger than input");
    if (img_w + layer.kw - 1 > n_slots) throw ShapeError(layer.name + ": row padding too small for linear convolution");
    const std::uint32_t h_pad = static_cast<std::uint32_t>(next_power_of_two(img_h));
    if (img_h + layer.kh - 1 > h_pad && 2 * h_pad > n_slots)
        throw ShapeError(layer.name + ": column padding too small for linear convolution");

    using hft::DftPlan;
    using hft::Direction;
    const std::uint32_t col_n = (img_h + layer.kh - 1 > h_pad) ? 2 * h_pad : h_pad;
    DftPlan row_fwd = DftPlan::build(n_slots, Direction::kForward);
    DftPlan row_inv = DftPlan::build(n_slots, Direction::kInverse);
    DftPlan col_fwd = DftPlan::build_embedded(col_n, n_slots, Direction::kForward);
    DftPlan col_inv = DftPlan::build_embedded(col_n, n_slots, Direction::kInverse);

    // Forward 2D spectrum per in-channel, held in transposed orientation:
    // spectrum grid row v, slot u = H[u, v].
    std::vector<CipherGrid> spectra;
    spectra.reserve(in.size());
    for (const auto& ch : in) {
        CipherGrid r = apply_hft(ctx, ch, row_fwd, exec);
        CipherGrid t = hft::transpose_grid(ctx, r, exec);
        t.row_len = col_n;  // zero rows above img_h take part in the column transform
        spectra.push_back(apply_hft(ctx, t, col_fwd, exec));
    }

    std::vector<CipherGrid> out(layer.out_channels);
    parallel_for(layer.out_channels, exec, [&](std::size_t oc) {
        // Sum filtered spectra over in-channels, then invert once.
        CipherGrid sum;
        sum.row_len = col_n;
        sum.rows.resize(n_slots);
        for (std::uint32_t ic = 0; ic < layer.in_channels; ++ic) {
            const double* f = &filter.data[(oc * layer.in_channels + ic) * layer.kh * layer.kw];
            std::vector<cplx> spec = dft::filter_spectrum(std::vector<double>(f, f + layer.kh * layer.kw), layer.kh,
                                                          layer.kw, col_n, n_slots);
            for (std::uint32_t v = 0; v < n_slots; ++v) {
                SlotVec diag(n_slots);
                for (std::uint32_t u = 0; u < col_n; ++u) diag[u] = spec[static_cast<std::size_t>(u) * n_slots + v];
                Ciphertext term = ctx.mult_pt(spectra[ic].rows[v], diag);
                sum.rows[v] = sum.rows[v].valid() ? ctx.add(sum.rows[v], term) : term;
            }
        }
        CipherGrid t2 = apply_hft(ctx, sum, col_inv, Exec::kSerial);
        CipherGrid g2 = hft::transpose_grid(ctx, t2, Exec::kSerial);
        CipherGrid y = apply_hft(ctx, g2, row_inv, Exec::kSerial);
        for (auto& row : y.rows) row = ctx.add_pt(row, SlotVec::constant(n_slots, bias.data[oc]));
        y.row_len = n_slots;
        out[oc] = std::move(y);
    });
    return out;
}

CipherGrid apply_stride(const HeContext& ctx, const CipherGrid& g, const StrideSpec& spec, Exec exec) {
    if (spec.stride < 1) throw ShapeError("apply_stride: stride must be >= 1");
    const std::uint32_t n = g.slot_count();
    const std::uint32_t out_h = (spec.valid_h - 1) / spec.stride + 1;
    const std::uint32_t out_w = (spec.valid_w - 1) / spec.stride + 1;
    if (spec.pad + (out_h - 1) * spec.stride >= g.n_rows()) throw ShapeError("apply_stride: rows out of range");
    if (spec.pad + (out_w - 1) * spec.stride >= n) throw ShapeError("apply_stride: columns out of range");

    // Group kept slots by rotation displacement; stride 1 collapses to a
    // single mask + rotation per row.
    std::map<std::uint32_t, SlotVec> groups;
    for (std::uint32_t q = 0; q < out_w; ++q) {
        const std::uint32_t src = spec.pad + q * spec.stride;
        const std::uint32_t d = (src - q) % n;
        auto it = groups.find(d);
        if (it == groups.end()) it = groups.emplace(d, SlotVec(n)).first;
        it->second[src] = cplx(1.0, 0.0);
    }

    CipherGrid out;
    out.row_len = out_w;
    out.rows.resize(out_h);
    parallel_for(out_h, exec, [&](std::size_t t) {
        const Ciphertext& src_row = g.rows[spec.pad + t * spec.stride];  // down rotation: free row reindexing
        Ciphertext acc;
        for (const auto& [d, mask] : groups) {
            Ciphertext m = ctx.mult_pt(src_row, mask);
            Ciphertext term = d == 0 ? m : ctx.rotate_left(m, d);
            acc = acc.valid() ? ctx.add(acc, term) : term;
        }
        out.rows[t] = acc;
    });
    return out;
}

namespace {

// Deposit the slot-0 value of `summed` into slot j of the accumulator.
Ciphertext deposit_at(const HeContext& ctx, const Ciphertext& summed, std::uint32_t j) {
    Ciphertext masked = ctx.mult_pt(summed, SlotVec::unit(summed.slot_count(), 0));
    if (j == 0) return masked;
    return ctx.rotate_left(masked, static_cast<std::int64_t>(summed.slot_count()) - static_cast<std::int64_t>(j));
}

SlotVec bias_vector(const Tensor& b, std::uint32_t n) {
    SlotVec v(n);
    for (std::size_t j = 0; j < b.data.size(); ++j) v[j] = cplx(b.data[j], 0.0);
    return v;
}

}  // namespace

Ciphertext flatten_dense(const HeContext& ctx, const std::vector<CipherGrid>& in, const Tensor& w, const Tensor& b,
                         RotSumMode mode, Exec exec) {
    if (in.empty()) throw ShapeError("flatten_dense: empty input");
    const std::uint32_t n = in[0].slot_count();
    const std::uint32_t rows = in[0].n_rows();
    const std::uint32_t cols = in[0].row_len;
    const std::size_t features = static_cast<std::size_t>(in.size()) * rows * cols;
    if (w.shape.size() != 2 || w.shape[1] != features) throw ShapeError("flatten_dense: weight columns != features");
    const std::uint32_t out_dim = static_cast<std::uint32_t>(w.shape[0]);
    if (out_dim > n) throw ShapeError("flatten_dense: more neurons than slots");
    if (b.data.size() != out_dim) throw ShapeError("flatten_dense: bias size mismatch");

    std::vector<Ciphertext> terms(out_dim);
    parallel_for(out_dim, exec, [&](std::size_t j) {
        Ciphertext acc;
        for (std::size_t ch = 0; ch < in.size(); ++ch) {
            for (std::uint32_t r = 0; r < rows; ++r) {
                SlotVec slice(n);
                const std::size_t base = j * features + (ch * rows + r) * cols;
                for (std::uint32_t c = 0; c < cols; ++c) slice[c] = cplx(w.data[base + c], 0.0);
                Ciphertext t = ctx.mult_pt(in[ch].rows[r], slice);
                acc = acc.valid() ? ctx.add(acc, t) : t;
            }
        }
        // repetitive left rotation and addition over the full ciphertext
        Ciphertext summed = ctx.rotate_sum(acc, n, mode);
        terms[j] = deposit_at(ctx, summed, static_cast<std::uint32_t>(j));
    });

    Ciphertext out = terms[0];
    for (std::uint32_t j = 1; j < out_dim; ++j) out = ctx.add(out, terms[j]);
    return ctx.add_pt(out, bias_vector(b, n));
}

Ciphertext dense(const HeContext& ctx, const Ciphertext& c, const Tensor& w, const Tensor& b, RotSumMode mode,
                 Exec exec) {
    if (w.shape.size() != 2) throw ShapeError("dense: weight must be a matrix");
    const std::uint32_t in_dim = static_cast<std::uint32_t>(w.shape[1]);
    const std::uint32_t out_dim = static_cast<std::uint32_t>(w.shape[0]);
    const std::uint32_t n = c.slot_count();
    if (in_dim > n) throw ShapeError("dense: input dim exceeds slots");
    if (out_dim > n) throw ShapeError("dense: more neurons than slots");
    if (b.data.size() != out_dim) throw ShapeError("dense: bias size mismatch");
    const std::uint32_t sum_terms = static_cast<std::uint32_t>(next_power_of_two(in_dim));

    std::vector<Ciphertext> terms(out_dim);
    parallel_for(out_dim, exec, [&](std::size_t j) {
        SlotVec row(n);
        for (std::uint32_t i = 0; i < in_dim; ++i) row[i] = cplx(w.data[j * in_dim + i], 0.0);
        Ciphertext prod = ctx.mult_pt(c, row);
        Ciphertext summed = ctx.rotate_sum(prod, sum_terms, mode);
        terms[j] = deposit_at(ctx, summed, static_cast<std::uint32_t>(j));
    });

    Ciphertext out = terms[0];
    for (std::uint32_t j = 1; j < out_dim; ++j) out = ctx.add(out, terms[j]);
    return ctx.add_pt(out, bias_vector(b, n));
}

Ciphertext action_head(const HeContext& ctx, const Ciphertext& latent, const ModelWeights& w, RotSumMode mode,
                       bool bypass_activations, Exec exec) {
    Ciphertext cur = latent;
    for (const auto& l : w.config.head) {
        cur = dense(ctx, cur, w.tensor(l.name + ".weight"), w.tensor(l.name + ".bias"), mode, exec);
        if (!bypass_activations) cur = apply_activation(ctx, cur, w.config.activation(l));
    }
    return cur;
}

}  // namespace fhenet::layers
