// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
//
// Compares the OpenMP grid kernels against their serial twins on the
// dominant pipeline stages: per-row HFT, grid transpose, one conv block,
// and a full pipeline input.

#include <chrono>
#include <cstdio>
#include <functional>

#include "fhenet/fixture.hpp"
#include "fhenet/hft.hpp"
#include "fhenet/layers.hpp"
#include "fhenet/pipeline.hpp"
#include "fhenet/simulator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace fhenet;

double time_once(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, double serial_s, double parallel_s) {
    std::printf("%-24s %10.3fs %10.3fs %8.2fx\n", name, serial_s, parallel_s,
                parallel_s > 0 ? serial_s / parallel_s : 0.0);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run serial\n");
#endif
    std::printf("%-24s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    ModelConfig cfg = default_config();
    ModelWeights w = fixture::gen_weights(1, cfg);
    auto inputs = fixture::gen_inputs(1, cfg, 1);

    SimParams sp;
    sp.max_level = pipeline::derive_max_level(cfg);
    sp.rotations = RotationSet(pipeline::required_rotations(cfg));
    SimContext ctx(sp);

    auto grid = layers::pack_input(ctx, inputs[0], cfg);
    auto plan = hft::DftPlan::build(cfg.slot_count, hft::Direction::kForward);

    double s, p;
    s = time_once([&] { hft::apply_hft(ctx, grid, plan, Exec::kSerial); });
    p = time_once([&] { hft::apply_hft(ctx, grid, plan, Exec::kParallel); });
    row("row_hft 50x256", s, p);

    auto spec_grid = hft::apply_hft(ctx, grid, plan, Exec::kParallel);
    s = time_once([&] { hft::transpose_grid(ctx, spec_grid, Exec::kSerial); });
    p = time_once([&] { hft::transpose_grid(ctx, spec_grid, Exec::kParallel); });
    row("transpose 50x256", s, p);

    const auto& l = cfg.conv[0];
    s = time_once([&] {
        layers::conv2d_freq(ctx, {grid}, l, w.tensor("conv1.filter"), w.tensor("conv1.bias"), Exec::kSerial);
    });
    p = time_once([&] {
        layers::conv2d_freq(ctx, {grid}, l, w.tensor("conv1.filter"), w.tensor("conv1.bias"), Exec::kParallel);
    });
    row("conv_block 1->8", s, p);

    pipeline::RunOptions opt;
    opt.exec = Exec::kSerial;
    s = time_once([&] { pipeline::run_encrypted(ctx, w, inputs[0], opt); });
    opt.exec = Exec::kParallel;
    p = time_once([&] { pipeline::run_encrypted(ctx, w, inputs[0], opt); });
    row("full_pipeline", s, p);
    return 0;
}
