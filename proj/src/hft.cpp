// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#include "fhenet/hft.hpp"

#include <cmath>

namespace fhenet::hft {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;
constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

std::uint32_t bit_reverse(std::uint32_t x, std::uint32_t bits) {
    std::uint32_t r = 0;
    for (std::uint32_t b = 0; b < bits; ++b) r |= ((x >> b) & 1u) << (bits - 1 - b);
    return r;
}

struct SparseEntry {
    std::uint32_t row;
    std::uint32_t col;
    cplx coeff;
};

// Radix-2 butterfly stage with block size 2^s, scaled by 1/sqrt(2) so the
// full composition is unitary. Forward twiddles use the e^{-i} convention.
std::vector<SparseEntry> butterfly(std::uint32_t n, std::uint32_t s, bool forward) {
    const std::uint32_t m = 1u << s;
    const std::uint32_t h = m >> 1;
    std::vector<SparseEntry> e;
    e.reserve(2 * n);
    for (std::uint32_t base = 0; base < n; base += m) {
        for (std::uint32_t j = 0; j < h; ++j) {
            const double ang = (forward ? -kTau : kTau) * static_cast<double>(j) / static_cast<double>(m);
            const cplx w(std::cos(ang), std::sin(ang));
            e.push_back({base + j, base + j, kInvSqrt2});
            e.push_back({base + j, base + j + h, w * kInvSqrt2});
            e.push_back({base + j + h, base + j, kInvSqrt2});
            e.push_back({base + j + h, base + j + h, -w * kInvSqrt2});
        }
    }
    return e;
}

std::vector<SparseEntry> conj_transpose(const std::vector<SparseEntry>& m) {
    std::vector<SparseEntry> out;
    out.reserve(m.size());
    for (const auto& x : m) out.push_back({x.col, x.row, std::conj(x.coeff)});
    return out;
}

// M * P_brev: column indices pass through the bit-reversal permutation.
std::vector<SparseEntry> compose_right_brev(const std::vector<SparseEntry>& m, std::uint32_t bits) {
    std::vector<SparseEntry> out;
    out.reserve(m.size());
    for (const auto& x : m) out.push_back({x.row, bit_reverse(x.col, bits), x.coeff});
    return out;
}

// P_brev * M: row indices pass through the permutation.
std::vector<SparseEntry> compose_left_brev(const std::vector<SparseEntry>& m, std::uint32_t bits) {
    std::vector<SparseEntry> out;
    out.reserve(m.size());
    for (const auto& x : m) out.push_back({bit_reverse(x.row, bits), x.col, x.coeff});
    return out;
}

DftStage to_stage(const std::vector<SparseEntry>& entries, std::uint32_t slot_count) {
    DftStage st;
    for (const auto& e : entries) {
        const std::uint32_t d = (e.col + slot_count - e.row) % slot_count;
        auto it = st.diagonals.find(d);
        if (it == st.diagonals.end()) it = st.diagonals.emplace(d, SlotVec(slot_count)).first;
        it->second[e.row] += e.coeff;
    }
    return st;
}

}  // namespace

DftPlan DftPlan::build(std::uint32_t n, Direction dir) { return build_embedded(n, n, dir); }

DftPlan DftPlan::build_embedded(std::uint32_t n, std::uint32_t slot_count, Direction dir) {
    if (!is_power_of_two(n)) throw PlanError("DftPlan: transform size must be a power of two >= 2");
    if (!is_power_of_two(slot_count) || slot_count < n)
        throw PlanError("DftPlan: slot_count must be a power of two >= transform size");
    const std::uint32_t bits = log2_exact(n);
    const bool forward = dir == Direction::kForward;

    DftPlan plan;
    plan.n_ = n;
    plan.slot_count_ = slot_count;
    plan.dir_ = dir;

    if (forward) {
        // F = B_bits ... B_2 (B_1 P), applied left stage first.
        plan.stages_.push_back(to_stage(compose_right_brev(butterfly(n, 1, true), bits), slot_count));
        for (std::uint32_t s = 2; s <= bits; ++s) plan.stages_.push_back(to_stage(butterfly(n, s, true), slot_count));
    } else {
        // F^-1 = F^H = P B_1^H B_2^H ... B_bits^H; fold P into the last stage.
        for (std::uint32_t s = bits; s >= 2; --s)
            plan.stages_.push_back(to_stage(conj_transpose(butterfly(n, s, true)), slot_count));
        plan.stages_.push_back(to_stage(compose_left_brev(conj_transpose(butterfly(n, 1, true)), bits), slot_count));
    }
    return plan;
}

std::uint32_t DftPlan::rotation_budget() const {
    std::uint32_t total = 0;
    for (const auto& st : stages_)
        for (const auto& [d, diag] : st.diagonals)
            if (d != 0) ++total;
    return total;
}

std::vector<cplx> DftPlan::apply_plain(const std::vector<cplx>& x) const {
    std::vector<cplx> cur = x;
    std::vector<cplx> next(cur.size());
    for (const auto& st : stages_) {
        std::fill(next.begin(), next.end(), cplx(0.0, 0.0));
        for (const auto& [d, diag] : st.diagonals)
            for (std::size_t i = 0; i < cur.size(); ++i) next[i] += diag[i] * cur[(i + d) % cur.size()];
        std::swap(cur, next);
    }
    return cur;
}

std::vector<std::vector<cplx>> DftPlan::dense() const {
    std::vector<std::vector<cplx>> m(n_, std::vector<cplx>(n_, cplx(0.0, 0.0)));
    for (std::uint32_t j = 0; j < n_; ++j) {
        std::vector<cplx> e(slot_count_, cplx(0.0, 0.0));
        e[j] = cplx(1.0, 0.0);
        auto col = apply_plain(e);
        for (std::uint32_t i = 0; i < n_; ++i) m[i][j] = col[i];
    }
    return m;
}

namespace {

Ciphertext apply_stage_direct(const HeContext& ctx, const Ciphertext& c, const DftStage& st) {
    Ciphertext acc;
    for (const auto& [d, diag] : st.diagonals) {
        Ciphertext rotated = d == 0 ? c : ctx.rotate_left(c, d);
        Ciphertext term = ctx.mult_pt(rotated, diag);
        acc = acc.valid() ? ctx.add(acc, term) : term;
    }
    return acc;
}

SlotVec rotate_right_plain(const SlotVec& v, std::uint32_t amount) {
    const std::size_t n = v.size();
    SlotVec out(n);
    for (std::size_t i = 0; i < n; ++i) out[(i + amount) % n] = v[i];
    return out;
}

Ciphertext apply_stage_bsgs(const HeContext& ctx, const Ciphertext& c, const DftStage& st) {
    const std::uint32_t count = static_cast<std::uint32_t>(st.diagonals.size());
    const std::uint32_t g = std::max(1u, static_cast<std::uint32_t>(std::lround(std::sqrt(double(count)))));
    // giant index q -> (baby b -> pre-rotated diagonal)
    std::map<std::uint32_t, std::map<std::uint32_t, SlotVec>> grouped;
    for (const auto& [d, diag] : st.diagonals) grouped[d / g].emplace(d % g, rotate_right_plain(diag, (d / g) * g));

    std::map<std::uint32_t, Ciphertext> babies;
    Ciphertext acc;
    for (const auto& [q, terms] : grouped) {
        Ciphertext inner;
        for (const auto& [b, diag] : terms) {
            auto it = babies.find(b);
            if (it == babies.end()) it = babies.emplace(b, b == 0 ? c : ctx.rotate_left(c, b)).first;
            Ciphertext t = ctx.mult_pt(it->second, diag);
            inner = inner.valid() ? ctx.add(inner, t) : t;
        }
        if (q != 0) inner = ctx.rotate_left(inner, q * g);
        acc = acc.valid() ? ctx.add(acc, inner) : inner;
    }
    return acc;
}

}  // namespace

Ciphertext apply_hft(const HeContext& ctx, const Ciphertext& c, const DftPlan& plan) {
    if (c.slot_count() != plan.slot_count()) throw ShapeError("apply_hft: slot_count does not match plan");
    Ciphertext cur = c;
    for (const auto& st : plan.stages())
        cur = (plan.use_bsgs && st.diagonals.size() > 8) ? apply_stage_bsgs(ctx, cur, st)
                                                         : apply_stage_direct(ctx, cur, st);
    return cur;
}

CipherGrid apply_hft(const HeContext& ctx, const CipherGrid& g, const DftPlan& plan, Exec exec) {
    CipherGrid out;
    out.rows.resize(g.rows.size());
    out.row_len = plan.size();
    parallel_for(g.rows.size(), exec, [&](std::size_t i) { out.rows[i] = apply_hft(ctx, g.rows[i], plan); });
    return out;
}

CipherGrid transpose_grid(const HeContext& ctx, const CipherGrid& g, Exec exec) {
    const std::uint32_t r = g.n_rows();
    const std::uint32_t c = g.row_len;
    const std::uint32_t n = g.slot_count();
    if (r == 0 || c == 0) throw ShapeError("transpose_grid: empty grid");
    if (r > n) throw ShapeError("transpose_grid: more rows than slots");

    CipherGrid out;
    out.rows.resize(c);
    out.row_len = static_cast<std::uint32_t>(next_power_of_two(r));
    parallel_for(c, exec, [&](std::size_t j) {
        Ciphertext acc;
        for (std::uint32_t i = 0; i < r; ++i) {
            Ciphertext masked = ctx.mult_pt(g.rows[i], SlotVec::unit(n, j));
            std::uint32_t d = (static_cast<std::uint32_t>(j) + n - i) % n;
            Ciphertext term = d == 0 ? masked : ctx.rotate_left(masked, d);
            acc = acc.valid() ? ctx.add(acc, term) : term;
        }
        out.rows[j] = acc;
    });
    return out;
}

CipherGrid encrypt_grid(HeContext& ctx, const std::vector<std::vector<double>>& m, std::uint32_t slot_count) {
    CipherGrid g;
    g.row_len = m.empty() ? 0 : static_cast<std::uint32_t>(m[0].size());
    for (const auto& row : m) {
        if (row.size() != m[0].size()) throw ShapeError("encrypt_grid: ragged rows");
        if (row.size() > slot_count) throw ShapeError("encrypt_grid: row wider than slot_count");
        SlotVec v(slot_count);
        for (std::size_t i = 0; i < row.size(); ++i) v[i] = cplx(row[i], 0.0);
        g.rows.push_back(ctx.encrypt(v));
    }
    return g;
}

std::vector<std::vector<cplx>> decrypt_grid(const HeContext& ctx, const CipherGrid& g) {
    std::vector<std::vector<cplx>> m;
    m.reserve(g.rows.size());
    for (const auto& row : g.rows) m.push_back(ctx.decrypt(row).data());
    return m;
}

}  // namespace fhenet::hft
