// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#include "fhenet/pipeline.hpp"

#include <chrono>
#include <set>

namespace fhenet::pipeline {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int act_depth(const ActivationSpec& spec) {
    switch (spec.kind) {
        case ActKind::kReluCompG: return 8 * spec.compg_depth + 4;
        case ActKind::kTanhPoly8: return 4 + (spec.scale_factor > 2.0 ? 1 : 0);
        case ActKind::kIdentity: return 0;
    }
    return 0;
}

Tensor grid_output_tensor(const HeContext& ctx, const std::vector<layers::CipherGrid>& grids) {
    const std::uint32_t ch = static_cast<std::uint32_t>(grids.size());
    const std::uint32_t h = grids[0].n_rows();
    const std::uint32_t w = grids[0].row_len;
    Tensor t = Tensor::zeros({ch, h, w});
    for (std::uint32_t c = 0; c < ch; ++c) {
        Tensor plane = layers::unpack_grid(ctx, grids[c]);
        std::copy(plane.data.begin(), plane.data.end(), t.data.begin() + static_cast<std::size_t>(c) * h * w);
    }
    return t;
}

Tensor ct_output_tensor(const HeContext& ctx, const Ciphertext& c, std::uint32_t dim) {
    SlotVec v = ctx.decrypt(c);
    Tensor t = Tensor::zeros({dim});
    for (std::uint32_t i = 0; i < dim; ++i) t.data[i] = v[i].real();
    return t;
}

int grid_level(const std::vector<layers::CipherGrid>& grids) { return grids[0].rows[0].level(); }

}  // namespace

ref::BlockTrace EncryptedRun::trace() const {
    ref::BlockTrace t;
    for (const auto& b : blocks) t.blocks.emplace_back(b.name, b.output);
    return t;
}

std::vector<std::string> block_names(const ModelConfig& cfg) {
    std::vector<std::string> names;
    for (const auto& l : cfg.conv) names.push_back(l.name);
    for (const auto& l : cfg.linear) names.push_back(l.name);
    names.push_back("head");
    return names;
}

EncryptedRun run_encrypted(HeContext& ctx, const ModelWeights& w, const std::vector<Tensor>& frames,
                           const RunOptions& opt) {
    const auto& cfg = w.config;
    EncryptedRun run;
    const auto t_start = std::chrono::steady_clock::now();
    const int max_blocks = opt.blocks < 0 ? 7 : opt.blocks;
    int block_idx = 0;

    CostSnapshot prev = ctx.meter().snapshot();
    auto record = [&](const std::string& name, Tensor out, int level_in, int level_out, double wall) {
        BlockResult r;
        r.name = name;
        r.output = std::move(out);
        r.level_in = level_in;
        r.level_out = level_out;
        CostSnapshot now = ctx.meter().snapshot();
        r.cost = now - prev;
        prev = now;
        r.wall_s = wall;
        run.blocks.push_back(std::move(r));
    };

    std::vector<layers::CipherGrid> grids{layers::pack_input(ctx, frames, cfg)};
    prev = ctx.meter().snapshot();  // packing encrypts; not attributed to a block
    std::uint32_t img_h = cfg.image_h(), img_w = cfg.image_w();

    for (const auto& l : cfg.conv) {
        if (block_idx >= max_blocks) return run;
        auto t0 = std::chrono::steady_clock::now();
        const int lvl_in = grid_level(grids);
        auto conv = layers::conv2d_freq(ctx, grids, l, w.tensor(l.name + ".filter"), w.tensor(l.name + ".bias"),
                                        opt.exec);
        layers::StrideSpec ss;
        ss.stride = l.stride;
        ss.pad = l.kh - 1;  // also the column offset; square filters throughout
        ss.valid_h = img_h - l.kh + 1;
        ss.valid_w = img_w - l.kw + 1;
        std::vector<layers::CipherGrid> next(conv.size());
        for (std::size_t c = 0; c < conv.size(); ++c) next[c] = layers::apply_stride(ctx, conv[c], ss, opt.exec);
        if (!opt.bypass_activations) {
            const ActivationSpec spec = cfg.activation(l);
            for (auto& g : next) g = layers::apply_activation(ctx, g, spec, opt.exec);
        }
        grids = std::move(next);
        img_h = (ss.valid_h - 1) / l.stride + 1;
        img_w = (ss.valid_w - 1) / l.stride + 1;
        record(l.name, grid_output_tensor(ctx, grids), lvl_in, grid_level(grids), seconds_since(t0));
        ++block_idx;
    }

    Ciphertext cur;
    bool first_linear = true;
    for (const auto& l : cfg.linear) {
        if (block_idx >= max_blocks) return run;
        auto t0 = std::chrono::steady_clock::now();
        const int lvl_in = first_linear ? grid_level(grids) : cur.level();
        if (first_linear) {
            cur = layers::flatten_dense(ctx, grids, w.tensor(l.name + ".weight"), w.tensor(l.name + ".bias"),
                                        opt.rotsum, opt.exec);
            first_linear = false;
        } else {
            cur = layers::dense(ctx, cur, w.tensor(l.name + ".weight"), w.tensor(l.name + ".bias"), opt.rotsum,
                                opt.exec);
        }
        if (!opt.bypass_activations) cur = layers::apply_activation(ctx, cur, cfg.activation(l));
        record(l.name, ct_output_tensor(ctx, cur, l.out), lvl_in, cur.level(), seconds_since(t0));
        ++block_idx;
    }

    if (block_idx < max_blocks) {
        auto t0 = std::chrono::steady_clock::now();
        const int lvl_in = cur.level();
        cur = layers::action_head(ctx, cur, w, opt.rotsum, opt.bypass_activations, opt.exec);
        record("head", ct_output_tensor(ctx, cur, w.config.head.back().out), lvl_in, cur.level(), seconds_since(t0));
    }

    run.total_wall_s = seconds_since(t_start);
    return run;
}

DepthLedger static_depth(const ModelConfig& cfg, bool bypass_activations) {
    DepthLedger ledger;
    const std::uint32_t n = cfg.slot_count;
    const std::uint32_t row_depth = log2_exact(n);
    std::uint32_t img_h = cfg.image_h(), img_w = cfg.image_w();
    for (const auto& l : cfg.conv) {
        std::uint32_t h_pad = static_cast<std::uint32_t>(next_power_of_two(img_h));
        std::uint32_t col_n = (img_h + l.kh - 1 > h_pad) ? 2 * h_pad : h_pad;
        int d = static_cast<int>(row_depth)        // row HFT
                + 1                                // transpose mask
                + static_cast<int>(log2_exact(col_n))  // column HFT
                + 1                                // filter spectrum multiply
                + static_cast<int>(log2_exact(col_n))  // inverse column HFT
                + 1                                // transpose mask
                + static_cast<int>(row_depth)      // inverse row HFT
                + 1;                               // stride mask
        if (!bypass_activations) d += act_depth(cfg.activation(l));
        ledger.per_block.emplace_back(l.name, d);
        img_h = (img_h - l.kh) / l.stride + 1;
        img_w = (img_w - l.kw) / l.stride + 1;
    }
    for (const auto& l : cfg.linear) {
        int d = 2;  // weight multiply + slot-isolation mask
        if (!bypass_activations) d += act_depth(cfg.activation(l));
        ledger.per_block.emplace_back(l.name, d);
    }
    int head = 0;
    for (const auto& l : cfg.head) {
        head += 2;
        if (!bypass_activations) head += act_depth(cfg.activation(l));
    }
    ledger.per_block.emplace_back("head", head);
    for (const auto& [name, d] : ledger.per_block) ledger.total += d;
    return ledger;
}

std::vector<std::uint32_t> required_rotations(const ModelConfig& cfg) {
    const std::uint32_t n = cfg.slot_count;
    std::set<std::uint32_t> amounts;
    auto add_plan = [&](std::uint32_t size) {
        using hft::DftPlan;
        for (auto dir : {hft::Direction::kForward, hft::Direction::kInverse}) {
            DftPlan p = DftPlan::build_embedded(size, n, dir);
            for (const auto& st : p.stages())
                for (const auto& [d, diag] : st.diagonals)
                    if (d != 0) amounts.insert(d);
        }
    };

    std::uint32_t img_h = cfg.image_h(), img_w = cfg.image_w();
    add_plan(n);
    for (const auto& l : cfg.conv) {
        std::uint32_t h_pad = static_cast<std::uint32_t>(next_power_of_two(img_h));
        std::uint32_t col_n = (img_h + l.kh - 1 > h_pad) ? 2 * h_pad : h_pad;
        add_plan(col_n);
        // transposes touch every displacement between a row index and a
        // column index, which spans the whole group
        for (std::uint32_t d = 1; d < n; ++d) amounts.insert(d);
        std::uint32_t valid_w = img_w - l.kw + 1;
        std::uint32_t out_w = (valid_w - 1) / l.stride + 1;
        for (std::uint32_t q = 0; q < out_w; ++q) amounts.insert(((l.kh - 1) + q * l.stride - q) % n);
        img_h = (img_h - l.kh) / l.stride + 1;
        img_w = out_w;
    }
    // rotate-sum (both modes) and slot-deposit rotations
    for (std::uint32_t d = 1; d < n; ++d) amounts.insert(d);
    amounts.erase(0u);
    return {amounts.begin(), amounts.end()};
}

int derive_max_level(const ModelConfig& cfg) {
    if (cfg.max_level > 0) return cfg.max_level;
    return static_depth(cfg).total + 8;
}

}  // namespace fhenet::pipeline
