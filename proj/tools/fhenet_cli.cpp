// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: fixture generation, encrypted pipeline execution
// on either backend with parity reporting, and per-block cost/timing
// benchmarks.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>

#include "fhenet/ckks.hpp"
#include "fhenet/dft.hpp"
#include "fhenet/fixture.hpp"
#include "fhenet/hft.hpp"
#include "fhenet/pipeline.hpp"
#include "fhenet/report.hpp"
#include "fhenet/simulator.hpp"

namespace {

using namespace fhenet;

struct RunArgs {
    std::string backend = "simulator";
    std::string noise = "off";
    std::string weights;
    std::string inputs;
    std::string blocks = "all";
    std::string rotsum = "tree";
    std::string out;
    std::uint64_t seed = 0;
    bool serial = false;
    bool bypass_acts = false;
    int limit_inputs = 0;
    report::Tolerances tol;
};

std::vector<std::vector<Tensor>> load_inputs(const std::string& path, int limit) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::directory_iterator(path))
            if (e.path().extension() == ".txt") files.push_back(e.path().string());
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    if (files.empty()) throw ConfigError("no input files under " + path);
    if (limit > 0 && static_cast<int>(files.size()) > limit) files.resize(limit);
    std::vector<std::vector<Tensor>> out;
    for (const auto& f : files) out.push_back(fixture::load_frames(f));
    return out;
}

int resolve_blocks(const std::string& blocks, const ModelConfig& cfg) {
    if (blocks == "all") return -1;
    auto names = pipeline::block_names(cfg);
    std::vector<std::string> want;
    std::stringstream ss(blocks);
    std::string tok;
    while (std::getline(ss, tok, ',')) want.push_back(tok);
    for (std::size_t i = 0; i < want.size(); ++i) {
        if (i >= names.size() || names[i] != want[i])
            throw ConfigError("--blocks must be a prefix of: " + [&] {
                std::string all;
                for (const auto& n : names) all += n + ",";
                return all;
            }());
    }
    return static_cast<int>(want.size());
}

// Depth-4 single-row circuit for backend comparison: forward 8-point HFT of
// the first image row followed by the plaintext filter-spectrum multiply.
report::ParityReport run_convrow(HeContext& ctx, const ModelWeights& w,
                                 const std::vector<std::vector<Tensor>>& inputs, const RunArgs& args) {
    const std::uint32_t n = 8;
    hft::DftPlan plan = hft::DftPlan::build(n, hft::Direction::kForward);

    report::ParityReport rep;
    rep.backend = ctx.name();
    rep.noise = args.noise;
    rep.rotsum = args.rotsum;
    rep.seed = args.seed;
    rep.n_inputs = static_cast<int>(inputs.size());
    rep.tol = args.tol;
    rep.tol.poly_mae = 1e9;  // single-block demo: only the exact-path MAE is bounded

    const auto& filt = w.tensor(w.config.conv[0].name + ".filter");
    std::vector<double> taps(filt.data.begin(), filt.data.begin() + w.config.conv[0].kw);
    std::vector<cplx> fspec = dft::filter_spectrum(taps, 1, taps.size(), 1, n);

    double sum_err = 0.0;
    double wall = 0.0;
    CostSnapshot before = ctx.meter().snapshot();
    int levels_used = 0;
    for (const auto& frames : inputs) {
        SlotVec row(n);
        for (std::uint32_t i = 0; i < n; ++i) row[i] = cplx(frames[0].data[i], 0.0);

        auto t0 = std::chrono::steady_clock::now();
        Ciphertext c = ctx.encrypt(row);
        const int lvl_in = c.level();
        c = hft::apply_hft(ctx, c, plan);
        SlotVec fvec(n);
        for (std::uint32_t i = 0; i < n; ++i) fvec[i] = fspec[i];
        c = ctx.mult_pt(c, fvec);
        levels_used = lvl_in - c.level();
        SlotVec got = ctx.decrypt(c);
        wall += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        // plaintext oracle: unitary spectrum times filter spectrum
        std::vector<cplx> want = plan.apply_plain(row.data());
        double err = 0.0;
        for (std::uint32_t i = 0; i < n; ++i) err += std::abs(got[i] - want[i] * fspec[i]);
        sum_err += err / n;
    }

    report::BlockReport br;
    br.name = "convrow";
    br.mae_vs_exact = sum_err / static_cast<double>(inputs.size());
    br.mae_vs_poly = 0.0;
    br.levels_used = levels_used;
    br.cost = ctx.meter().snapshot() - before;
    br.wall_s = wall / static_cast<double>(inputs.size());
    rep.blocks.push_back(br);
    rep.total_wall_s = wall;
    rep.passed = br.mae_vs_exact <= 1e-2;
    return rep;
}

int cmd_run(const RunArgs& args) {
    ModelWeights w = ModelWeights::load(args.weights);
    w.validate();
    auto inputs = load_inputs(args.inputs, args.limit_inputs);

    pipeline::RunOptions opt;
    opt.rotsum = rotsum_from_string(args.rotsum);
    opt.exec = args.serial ? Exec::kSerial : Exec::kParallel;
    opt.bypass_activations = args.bypass_acts;

    report::Tolerances tol = args.tol;
    if (args.noise != "off") tol.poly_mae = 1e9;  // noise dominates the poly comparison

    report::ParityReport rep;
    if (args.blocks == "convrow") {
        if (args.backend == "ckks") {
            ckks::CkksParams cp;
            cp.ring_dim = 8192;
            cp.seed = args.seed;
            for (std::uint32_t r = 1; r < 8; ++r) cp.rotation_amounts.push_back(r);
            ckks::CkksContext ctx(cp);
            rep = run_convrow(ctx, w, inputs, args);
        } else {
            SimParams sp;
            sp.seed = args.seed;
            sp.max_level = 8;
            sp.rotations = RotationSet::all_below(8);
            sp.noise = args.noise == "preset" ? NoiseModel::preset(args.seed) : NoiseModel::off();
            SimContext ctx(sp);
            rep = run_convrow(ctx, w, inputs, args);
        }
    } else {
        const int blocks = resolve_blocks(args.blocks, w.config);
        opt.blocks = blocks;

        // Level budget for the selected prefix, from the static depth ledger.
        auto ledger = pipeline::static_depth(w.config, args.bypass_acts);
        const int n_run = blocks < 0 ? static_cast<int>(ledger.per_block.size()) : blocks;
        int depth_needed = 0;
        for (int i = 0; i < n_run; ++i) depth_needed += ledger.per_block[i].second;

        std::unique_ptr<HeContext> ctx;
        if (args.backend == "ckks") {
            ckks::CkksParams cp;
            cp.seed = args.seed;
            if (depth_needed > cp.max_level) {
                int acc = 0;
                std::string offender = ledger.per_block.front().first;
                for (int i = 0; i < n_run; ++i) {
                    acc += ledger.per_block[i].second;
                    if (acc > cp.max_level) {
                        offender = ledger.per_block[i].first;
                        break;
                    }
                }
                std::cerr << "error: circuit depth " << depth_needed << " exceeds the ckks level budget "
                          << cp.max_level << " (exhausted inside block " << offender
                          << "); use --blocks convrow or the simulator backend\n";
                return 2;
            }
            cp.rotation_amounts = pipeline::required_rotations(w.config);
            ctx = std::make_unique<ckks::CkksContext>(cp);
        } else {
            SimParams sp;
            sp.seed = args.seed;
            sp.max_level = depth_needed + 8;
            sp.rotations = RotationSet(pipeline::required_rotations(w.config));
            sp.noise = args.noise == "preset" ? NoiseModel::preset(args.seed) : NoiseModel::off();
            ctx = std::make_unique<SimContext>(sp);
        }

        std::vector<pipeline::EncryptedRun> runs;
        std::vector<ref::BlockTrace> exact, poly;
        try {
            for (const auto& frames : inputs) {
                runs.push_back(pipeline::run_encrypted(*ctx, w, frames, opt));
                auto te = ref::forward_exact(w, frames, args.bypass_acts);
                auto tp = ref::forward_poly(w, frames, args.bypass_acts);
                const std::size_t keep = runs.back().blocks.size();
                te.blocks.resize(keep);
                tp.blocks.resize(keep);
                exact.push_back(std::move(te));
                poly.push_back(std::move(tp));
            }
        } catch (const DepthExhausted& e) {
            std::cerr << "error: depth exhausted during block "
                      << (runs.empty() ? std::string("conv1") : runs.back().blocks.back().name) << ": " << e.what()
                      << "\n";
            return 2;
        }
        rep = report::assemble(args.backend, runs, exact, poly, tol);
        rep.noise = args.noise;
        rep.rotsum = args.rotsum;
        rep.seed = args.seed;
        rep.bypass_activations = args.bypass_acts;
    }

    std::cout << "backend=" << rep.backend << " inputs=" << rep.n_inputs << "\n";
    for (const auto& b : rep.blocks)
        std::cout << "  " << b.name << ": mae_vs_exact=" << b.mae_vs_exact << " mae_vs_poly=" << b.mae_vs_poly
                  << " levels=" << b.levels_used << " wall=" << b.wall_s << "s\n";
    if (rep.r2_valid) std::cout << "  r2=" << rep.r2 << "\n";
    std::cout << (rep.passed ? "PASS" : "FAIL") << "\n";
    if (!args.out.empty()) rep.save(args.out);
    return rep.passed ? 0 : 1;
}

int cmd_bench(const RunArgs& args) {
    ModelWeights w = ModelWeights::load(args.weights);
    w.validate();
    auto inputs = load_inputs(args.inputs, std::max(args.limit_inputs, 1));
    inputs.resize(1);

    std::cout << "per-block structural cost (multiplications + rotations) and wall time\n";
    report::ParityReport reports[2];
    const char* mode_names[2] = {"naive", "tree"};
    for (int m = 0; m < 2; ++m) {
        SimParams sp;
        sp.seed = args.seed;
        sp.max_level = pipeline::derive_max_level(w.config);
        sp.rotations = RotationSet(pipeline::required_rotations(w.config));
        SimContext ctx(sp);
        pipeline::RunOptions opt;
        opt.rotsum = rotsum_from_string(mode_names[m]);
        opt.exec = args.serial ? Exec::kSerial : Exec::kParallel;
        auto run = pipeline::run_encrypted(ctx, w, inputs[0], opt);
        auto te = ref::forward_exact(w, inputs[0]);
        auto tp = ref::forward_poly(w, inputs[0]);
        reports[m] = report::assemble("simulator", {run}, {te}, {tp}, args.tol);

        std::cout << "rotate-sum mode: " << mode_names[m] << "\n";
        for (const auto& b : reports[m].blocks) {
            std::cout << "  " << b.name << ": mult_ct=" << b.cost.count(OpKind::kMultCt)
                      << " mult_pt=" << b.cost.count(OpKind::kMultPt) << " rotate=" << b.cost.count(OpKind::kRotate)
                      << " total=" << b.cost.total_mults_and_rotations() << " levels=" << b.levels_used
                      << " wall=" << b.wall_s << "s\n";
        }
    }
    for (std::size_t i = 0; i < reports[0].blocks.size(); ++i) {
        const auto naive_rot = reports[0].blocks[i].cost.count(OpKind::kRotate);
        const auto tree_rot = reports[1].blocks[i].cost.count(OpKind::kRotate);
        std::cout << reports[0].blocks[i].name << ": rotations naive=" << naive_rot << " tree=" << tree_rot << "\n";
    }
    if (!args.out.empty()) reports[1].save(args.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"encrypted actor-network inference harness"};
    app.require_subcommand(1);

    // genfix
    auto* gen = app.add_subcommand("genfix", "generate deterministic weight and input fixtures");
    std::uint64_t gen_seed = 0;
    std::string gen_out = "fixtures";
    std::string gen_arch = "default";
    int gen_count = 20;
    gen->add_option("--seed", gen_seed, "fixture seed");
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--arch", gen_arch, "architecture: default|small");
    gen->add_option("--count", gen_count, "number of input fixtures");

    // run
    auto* run = app.add_subcommand("run", "run the encrypted pipeline and report parity");
    RunArgs ra;
    run->add_option("--backend", ra.backend, "simulator|ckks");
    run->add_option("--noise", ra.noise, "off|preset");
    run->add_option("--weights", ra.weights, "weights JSON path")->required();
    run->add_option("--inputs", ra.inputs, "input file or directory")->required();
    run->add_option("--blocks", ra.blocks, "all, a prefix list (conv1,conv2,...), or convrow");
    run->add_option("--rotsum", ra.rotsum, "naive|tree");
    run->add_option("--out", ra.out, "report JSON path");
    run->add_option("--seed", ra.seed, "backend seed");
    run->add_option("--limit-inputs", ra.limit_inputs, "use only the first N inputs");
    run->add_flag("--serial", ra.serial, "disable the OpenMP kernels");
    run->add_flag("--bypass-acts", ra.bypass_acts, "skip activations on both paths");
    run->add_option("--tol-block-mae", ra.tol.block_mae, "per-block MAE bound vs exact");
    run->add_option("--tol-poly-mae", ra.tol.poly_mae, "per-block MAE bound vs poly reference");
    run->add_option("--min-r2", ra.tol.min_r2, "minimum end-to-end R^2");

    // bench
    auto* bench = app.add_subcommand("bench", "per-block cost and timing report");
    RunArgs ba;
    bench->add_option("--weights", ba.weights, "weights JSON path")->required();
    bench->add_option("--inputs", ba.inputs, "input file or directory")->required();
    bench->add_option("--out", ba.out, "report JSON path");
    bench->add_option("--seed", ba.seed, "backend seed");
    bench->add_flag("--serial", ba.serial, "disable the OpenMP kernels");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            auto res = fixture::generate(gen_out, gen_seed, gen_arch, gen_count);
            std::cout << "wrote " << res.weights_path << " and " << res.input_paths.size() << " inputs\n";
            return 0;
        }
        if (run->parsed()) return cmd_run(ra);
        if (bench->parsed()) return cmd_bench(ba);
    } catch (const DepthExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
