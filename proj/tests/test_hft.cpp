// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fhenet/hft.hpp"
#include "fhenet/simulator.hpp"
#include "oracles.hpp"

using namespace fhenet;
using hft::DftPlan;
using hft::Direction;

namespace {

double max_abs(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("plan rejects non-power-of-two sizes") {
    CHECK_THROWS_AS(DftPlan::build(12, Direction::kForward), PlanError);
    CHECK_THROWS_AS(DftPlan::build_embedded(8, 12, Direction::kForward), PlanError);
    CHECK_THROWS_AS(DftPlan::build_embedded(16, 8, Direction::kForward), PlanError);
}

TEST_CASE("2-point plan on [1, 0]") {
    auto plan = DftPlan::build(2, Direction::kForward);
    auto got = plan.apply_plain({{1, 0}, {0, 0}});
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(got[0] - cplx(s, 0)) <= 1e-12);
    CHECK(std::abs(got[1] - cplx(s, 0)) <= 1e-12);
}

TEST_CASE("dense composition equals the direct DFT matrix") {
    for (std::uint32_t n : {8u, 16u}) {
        for (auto dir : {Direction::kForward, Direction::kInverse}) {
            auto plan = DftPlan::build(n, dir);
            CHECK(plan.depth() == log2_exact(n));
            auto dense = plan.dense();
            double err = 0.0;
            for (std::uint32_t j = 0; j < n; ++j) {
                std::vector<cplx> e(n, cplx(0, 0));
                e[j] = cplx(1, 0);
                auto col = oracles::dft_direct(e, dir == Direction::kInverse);
                for (std::uint32_t i = 0; i < n; ++i) err = std::max(err, std::abs(dense[i][j] - col[i]));
            }
            CHECK(err <= 1e-12);
        }
    }
}

TEST_CASE("stage diagonal structure: butterfly stages carry at most 3 diagonals") {
    auto plan = DftPlan::build(64, Direction::kForward);
    const auto& st = plan.stages();
    REQUIRE(st.size() == 6);
    // +h and -h coincide mod n in the final stage, leaving 2 diagonals there
    for (std::size_t s = 1; s < st.size(); ++s) {
        CHECK(st[s].diagonals.size() >= 2);
        CHECK(st[s].diagonals.size() <= 3);
    }
    // the permutation is folded into the first stage's diagonals
    CHECK(st[0].diagonals.size() > 3);
}

TEST_CASE("apply_hft of an impulse is a constant vector") {
    SimContext ctx = make_test_sim(16, 16, 1);
    auto plan = DftPlan::build(16, Direction::kForward);
    auto c = ctx.encrypt(SlotVec::unit(16, 0));
    auto got = ctx.decrypt(hft::apply_hft(ctx, c, plan));
    const double want = 1.0 / std::sqrt(16.0);
    for (int i = 0; i < 16; ++i) CHECK(std::abs(got[i] - cplx(want, 0)) <= 1e-12);
}

TEST_CASE("apply_hft matches the direct DFT oracle on random input") {
    SimContext ctx = make_test_sim(256, 32, 2);
    auto plan = DftPlan::build(256, Direction::kForward);
    oracles::Rng rng(21);
    auto v = rng.cvec(256);
    auto before = ctx.meter().snapshot();
    auto c = hft::apply_hft(ctx, ctx.encrypt(SlotVec(v)), plan);
    auto after = ctx.meter().snapshot();
    auto got = ctx.decrypt(c);
    auto want = oracles::dft_direct(v, false);
    CHECK(max_abs(got.data(), want) <= 1e-6);

    // depth == log2(n), rotations within the per-stage diagonal budget
    CHECK(plan.depth() == 8);
    CHECK(32 - c.level() == 8);
    CHECK(after.count(OpKind::kRotate) - before.count(OpKind::kRotate) <= plan.rotation_budget());
}

TEST_CASE("forward then inverse is the identity") {
    SimContext ctx = make_test_sim(64, 32, 3);
    auto fwd = DftPlan::build(64, Direction::kForward);
    auto inv = DftPlan::build(64, Direction::kInverse);
    oracles::Rng rng(4);
    auto v = rng.cvec(64);
    auto c = hft::apply_hft(ctx, hft::apply_hft(ctx, ctx.encrypt(SlotVec(v)), fwd), inv);
    CHECK(max_abs(ctx.decrypt(c).data(), v) <= 1e-9);
}

TEST_CASE("linearity: plan applied to a+b equals sum of applications") {
    SimContext ctx = make_test_sim(32, 32, 5);
    auto plan = DftPlan::build(32, Direction::kForward);
    oracles::Rng rng(6);
    auto a = rng.cvec(32), b = rng.cvec(32);
    std::vector<cplx> ab(32);
    for (int i = 0; i < 32; ++i) ab[i] = a[i] + b[i];
    auto lhs = ctx.decrypt(hft::apply_hft(ctx, ctx.encrypt(SlotVec(ab)), plan));
    auto ra = ctx.decrypt(hft::apply_hft(ctx, ctx.encrypt(SlotVec(a)), plan));
    auto rb = ctx.decrypt(hft::apply_hft(ctx, ctx.encrypt(SlotVec(b)), plan));
    double err = 0;
    for (int i = 0; i < 32; ++i) err = std::max(err, std::abs(lhs[i] - (ra[i] + rb[i])));
    CHECK(err <= 1e-9);
}

TEST_CASE("Parseval: unitary transform preserves energy") {
    SimContext ctx = make_test_sim(128, 16, 6);
    auto plan = DftPlan::build(128, Direction::kForward);
    oracles::Rng rng(8);
    auto v = rng.cvec(128);
    auto got = ctx.decrypt(hft::apply_hft(ctx, ctx.encrypt(SlotVec(v)), plan));
    double in_e = 0, out_e = 0;
    for (int i = 0; i < 128; ++i) {
        in_e += std::norm(v[i]);
        out_e += std::norm(got[i]);
    }
    CHECK(std::abs(in_e - out_e) <= 1e-6 * in_e);
}

TEST_CASE("embedded plan transforms the prefix and leaves padding at zero") {
    SimContext ctx = make_test_sim(64, 16, 7);
    auto plan = DftPlan::build_embedded(8, 64, Direction::kForward);
    oracles::Rng rng(9);
    auto v8 = rng.cvec(8);
    SlotVec wide(64);
    for (int i = 0; i < 8; ++i) wide[i] = v8[i];
    auto got = ctx.decrypt(hft::apply_hft(ctx, ctx.encrypt(wide), plan));
    auto want = oracles::dft_direct(v8, false);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-9);
    for (int i = 8; i < 64; ++i) CHECK(std::abs(got[i]) <= 1e-12);
}

TEST_CASE("baby-step/giant-step grouping gives the same transform, fewer rotations") {
    SimContext ctx = make_test_sim(64, 16, 10);
    oracles::Rng rng(12);
    auto v = rng.cvec(64);

    auto plain = DftPlan::build(64, Direction::kForward);
    auto before_direct = ctx.meter().count(OpKind::kRotate);
    auto direct = ctx.decrypt(hft::apply_hft(ctx, ctx.encrypt(SlotVec(v)), plain));
    auto direct_rots = ctx.meter().count(OpKind::kRotate) - before_direct;

    auto bsgs = DftPlan::build(64, Direction::kForward);
    bsgs.use_bsgs = true;
    auto before_bsgs = ctx.meter().count(OpKind::kRotate);
    auto grouped = ctx.decrypt(hft::apply_hft(ctx, ctx.encrypt(SlotVec(v)), bsgs));
    auto bsgs_rots = ctx.meter().count(OpKind::kRotate) - before_bsgs;

    CHECK(max_abs(direct.data(), grouped.data()) <= 1e-12);
    CHECK(bsgs_rots < direct_rots);
}

TEST_CASE("transpose of a 2x2 grid") {
    SimContext ctx = make_test_sim(4, 8, 11);
    auto g = hft::encrypt_grid(ctx, {{1, 2}, {3, 4}}, 4);
    auto t = hft::transpose_grid(ctx, g);
    auto m = hft::decrypt_grid(ctx, t);
    CHECK(m[0][0].real() == doctest::Approx(1));
    CHECK(m[0][1].real() == doctest::Approx(3));
    CHECK(m[1][0].real() == doctest::Approx(2));
    CHECK(m[1][1].real() == doctest::Approx(4));
}

TEST_CASE("transpose is an involution on the meaningful region") {
    SimContext ctx = make_test_sim(16, 8, 12);
    oracles::Rng rng(13);
    std::vector<std::vector<double>> img(4, std::vector<double>(6));
    for (auto& r : img)
        for (auto& x : r) x = rng.uniform(-1, 1);
    auto g = hft::encrypt_grid(ctx, img, 16);
    auto tt = hft::transpose_grid(ctx, hft::transpose_grid(ctx, g));
    auto m = hft::decrypt_grid(ctx, tt);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 6; ++c) CHECK(std::abs(m[r][c] - cplx(img[r][c], 0)) <= 1e-12);
}

TEST_CASE("transpose matches the plaintext oracle and the rotation-count formula") {
    SimContext ctx = make_test_sim(8, 8, 14);
    oracles::Rng rng(15);
    std::vector<std::vector<double>> img(8, std::vector<double>(8));
    for (auto& r : img)
        for (auto& x : r) x = rng.uniform(-1, 1);
    auto g = hft::encrypt_grid(ctx, img, 8);

    auto before = ctx.meter().snapshot();
    auto t = hft::transpose_grid(ctx, g);
    auto after = ctx.meter().snapshot();
    auto m = hft::decrypt_grid(ctx, t);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) CHECK(std::abs(m[c][r] - cplx(img[r][c], 0)) <= 1e-6);

    CHECK(after.count(OpKind::kRotate) - before.count(OpKind::kRotate) == hft::transpose_rotation_count(8, 8));
    CHECK(after.count(OpKind::kMultPt) - before.count(OpKind::kMultPt) == 64);
    CHECK(t.rows[0].level() == g.rows[0].level() - 1);
}

TEST_CASE("serial and parallel grid kernels agree") {
    SimContext ctx = make_test_sim(32, 32, 16);
    oracles::Rng rng(17);
    std::vector<std::vector<double>> img(12, std::vector<double>(20));
    for (auto& r : img)
        for (auto& x : r) x = rng.uniform(-1, 1);
    auto g = hft::encrypt_grid(ctx, img, 32);
    auto plan = DftPlan::build(32, Direction::kForward);

    auto a = hft::decrypt_grid(ctx, hft::apply_hft(ctx, g, plan, Exec::kSerial));
    auto b = hft::decrypt_grid(ctx, hft::apply_hft(ctx, g, plan, Exec::kParallel));
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t c = 0; c < a[r].size(); ++c) CHECK(a[r][c] == b[r][c]);

    auto ta = hft::decrypt_grid(ctx, hft::transpose_grid(ctx, g, Exec::kSerial));
    auto tb = hft::decrypt_grid(ctx, hft::transpose_grid(ctx, g, Exec::kParallel));
    for (std::size_t r = 0; r < ta.size(); ++r)
        for (std::size_t c = 0; c < ta[r].size(); ++c) CHECK(ta[r][c] == tb[r][c]);
}
