// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#include "fhenet/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fhenet {

using ordered_json = nlohmann::ordered_json;

ActKind act_from_string(const std::string& s) {
    if (s == "relu") return ActKind::kReluCompG;
    if (s == "tanh") return ActKind::kTanhPoly8;
    if (s == "none") return ActKind::kIdentity;
    throw ConfigError("unknown activation kind: " + s);
}

std::string act_to_string(ActKind k) {
    switch (k) {
        case ActKind::kReluCompG: return "relu";
        case ActKind::kTanhPoly8: return "tanh";
        case ActKind::kIdentity: return "none";
    }
    return "none";
}

std::vector<ModelConfig::BlockDims> ModelConfig::conv_output_dims() const {
    std::vector<BlockDims> dims;
    std::uint32_t h = image_h();
    std::uint32_t w = image_w();
    for (const auto& l : conv) {
        if (l.kh > h || l.kw > w) throw ShapeError(l.name + ": filter larger than input");
        std::uint32_t vh = h - l.kh + 1;
        std::uint32_t vw = w - l.kw + 1;
        h = (vh - 1) / l.stride + 1;
        w = (vw - 1) / l.stride + 1;
        dims.push_back({h, w});
    }
    return dims;
}

std::uint32_t ModelConfig::flatten_features() const {
    auto dims = conv_output_dims();
    if (conv.empty()) return image_h() * image_w();
    return conv.back().out_channels * dims.back().h * dims.back().w;
}

const Tensor& ModelWeights::tensor(const std::string& name) const {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw ConfigError("missing tensor: " + name);
    return it->second;
}

void ModelWeights::validate() const {
    const auto& c = config;
    if (c.frames == 0 || c.frame_h == 0 || c.frame_w == 0) throw ConfigError("config: empty image dims");
    if (!(c.slot_count >= 2 && (c.slot_count & (c.slot_count - 1)) == 0))
        throw ConfigError("config: slot_count must be a power of two");
    if (c.image_w() > c.slot_count) throw ConfigError("config: image width exceeds slot_count");

    std::uint32_t in_ch = 1;
    for (const auto& l : c.conv) {
        const auto& f = tensor(l.name + ".filter");
        std::vector<std::size_t> want{l.out_channels, l.in_channels, l.kh, l.kw};
        if (f.shape != want) throw ShapeError(l.name + ".filter: unexpected shape");
        if (l.in_channels != in_ch) throw ShapeError(l.name + ": in_channels mismatch");
        const auto& b = tensor(l.name + ".bias");
        if (b.shape != std::vector<std::size_t>{l.out_channels}) throw ShapeError(l.name + ".bias: unexpected shape");
        if (l.stride == 0) throw ConfigError(l.name + ": stride must be >= 1");
        if (l.act_scale <= 0.0) throw ConfigError(l.name + ": act_scale must be positive");
        in_ch = l.out_channels;
    }

    std::uint32_t in_dim = c.flatten_features();
    for (const auto& l : c.linear) {
        const auto& w = tensor(l.name + ".weight");
        if (w.shape != std::vector<std::size_t>{l.out, l.in}) throw ShapeError(l.name + ".weight: unexpected shape");
        if (l.in != in_dim) throw ShapeError(l.name + ": input dim mismatch");
        const auto& b = tensor(l.name + ".bias");
        if (b.shape != std::vector<std::size_t>{l.out}) throw ShapeError(l.name + ".bias: unexpected shape");
        in_dim = l.out;
    }
    if (!c.head.empty() && in_dim != 64) throw ShapeError("latent dimension before action head must be 64");
    for (const auto& l : c.head) {
        const auto& w = tensor(l.name + ".weight");
        if (w.shape != std::vector<std::size_t>{l.out, l.in}) throw ShapeError(l.name + ".weight: unexpected shape");
        if (l.in != in_dim) throw ShapeError(l.name + ": input dim mismatch");
        const auto& b = tensor(l.name + ".bias");
        if (b.shape != std::vector<std::size_t>{l.out}) throw ShapeError(l.name + ".bias: unexpected shape");
        in_dim = l.out;
    }
    if (in_dim != 1) throw ShapeError("head must end in a scalar regression output");
}

namespace {

ordered_json dense_to_json(const DenseLayer& l) {
    return ordered_json{{"name", l.name},           {"in", l.in},
                        {"out", l.out},             {"act", act_to_string(l.act)},
                        {"act_scale", l.act_scale}, {"compg", l.compg}};
}

DenseLayer dense_from_json(const ordered_json& j) {
    DenseLayer l;
    l.name = j.at("name").get<std::string>();
    l.in = j.at("in").get<std::uint32_t>();
    l.out = j.at("out").get<std::uint32_t>();
    l.act = act_from_string(j.at("act").get<std::string>());
    l.act_scale = j.at("act_scale").get<double>();
    l.compg = j.value("compg", 0);
    return l;
}

}  // namespace

std::string ModelWeights::to_json() const {
    ordered_json j;
    ordered_json cfg;
    cfg["frames"] = config.frames;
    cfg["frame_h"] = config.frame_h;
    cfg["frame_w"] = config.frame_w;
    cfg["slot_count"] = config.slot_count;
    cfg["max_level"] = config.max_level;
    cfg["compg_depth"] = config.compg_depth;
    cfg["compg_band"] = config.compg_band;
    cfg["tanh_coeffs"] = config.tanh_coeffs;
    cfg["conv"] = ordered_json::array();
    for (const auto& l : config.conv) {
        cfg["conv"].push_back(ordered_json{{"name", l.name},
                                           {"in", l.in_channels},
                                           {"out", l.out_channels},
                                           {"kh", l.kh},
                                           {"kw", l.kw},
                                           {"stride", l.stride},
                                           {"act", act_to_string(l.act)},
                                           {"act_scale", l.act_scale},
                                           {"compg", l.compg}});
    }
    cfg["linear"] = ordered_json::array();
    for (const auto& l : config.linear) cfg["linear"].push_back(dense_to_json(l));
    cfg["head"] = ordered_json::array();
    for (const auto& l : config.head) cfg["head"].push_back(dense_to_json(l));
    j["config"] = std::move(cfg);

    ordered_json tens;
    for (const auto& [name, t] : tensors) tens[name] = ordered_json{{"shape", t.shape}, {"data", t.data}};
    j["tensors"] = std::move(tens);
    return j.dump(1);
}

ModelWeights ModelWeights::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    ModelWeights w;
    const auto& cfg = j.at("config");
    w.config.frames = cfg.at("frames").get<std::uint32_t>();
    w.config.frame_h = cfg.at("frame_h").get<std::uint32_t>();
    w.config.frame_w = cfg.at("frame_w").get<std::uint32_t>();
    w.config.slot_count = cfg.at("slot_count").get<std::uint32_t>();
    w.config.max_level = cfg.at("max_level").get<int>();
    w.config.compg_depth = cfg.at("compg_depth").get<int>();
    w.config.compg_band = cfg.at("compg_band").get<double>();
    auto tc = cfg.at("tanh_coeffs").get<std::vector<double>>();
    if (tc.size() != 9) throw ConfigError("tanh_coeffs must have 9 entries");
    std::copy(tc.begin(), tc.end(), w.config.tanh_coeffs.begin());
    for (const auto& l : cfg.at("conv")) {
        ConvLayer c;
        c.name = l.at("name").get<std::string>();
        c.in_channels = l.at("in").get<std::uint32_t>();
        c.out_channels = l.at("out").get<std::uint32_t>();
        c.kh = l.at("kh").get<std::uint32_t>();
        c.kw = l.at("kw").get<std::uint32_t>();
        c.stride = l.at("stride").get<std::uint32_t>();
        c.act = act_from_string(l.at("act").get<std::string>());
        c.act_scale = l.at("act_scale").get<double>();
        c.compg = l.value("compg", 0);
        w.config.conv.push_back(std::move(c));
    }
    for (const auto& l : cfg.at("linear")) w.config.linear.push_back(dense_from_json(l));
    for (const auto& l : cfg.at("head")) w.config.head.push_back(dense_from_json(l));

    for (const auto& [name, t] : j.at("tensors").items()) {
        auto shape = t.at("shape").get<std::vector<std::size_t>>();
        auto data = t.at("data").get<std::vector<double>>();
        w.tensors.emplace(name, Tensor(std::move(shape), std::move(data)));
    }
    return w;
}

ModelWeights ModelWeights::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open weights file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void ModelWeights::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write weights file: " + path);
    out << to_json() << "\n";
}

ModelConfig default_config() {
    ModelConfig c;
    c.frames = 3;
    c.frame_h = 50;
    c.frame_w = 50;
    c.slot_count = 256;
    c.tanh_coeffs = fit_tanh_poly8();
    c.conv = {
        {"conv1", 1, 8, 3, 3, 2, ActKind::kReluCompG, 1.0},
        {"conv2", 8, 16, 3, 3, 2, ActKind::kReluCompG, 1.0},
        {"conv3", 16, 64, 3, 3, 2, ActKind::kReluCompG, 1.0},
    };
    c.linear = {
        {"linear1", c.flatten_features(), 64, ActKind::kReluCompG, 1.0},
        {"linear2", 64, 64, ActKind::kTanhPoly8, 2.0},
        {"linear3", 64, 64, ActKind::kTanhPoly8, 2.0},
    };
    c.head = {
        {"head1", 64, 64, ActKind::kReluCompG, 1.0},
        {"head2", 64, 64, ActKind::kReluCompG, 1.0},
        {"head3", 64, 1, ActKind::kIdentity, 1.0},
    };
    return c;
}

ModelConfig small_config() {
    ModelConfig c;
    c.frames = 3;
    c.frame_h = 16;
    c.frame_w = 16;
    c.slot_count = 64;
    c.tanh_coeffs = fit_tanh_poly8();
    c.conv = {
        {"conv1", 1, 4, 3, 3, 2, ActKind::kReluCompG, 1.0},
        {"conv2", 4, 8, 3, 3, 2, ActKind::kReluCompG, 1.0},
        {"conv3", 8, 16, 3, 3, 1, ActKind::kReluCompG, 1.0},
    };
    c.linear = {
        {"linear1", c.flatten_features(), 64, ActKind::kReluCompG, 1.0},
        {"linear2", 64, 64, ActKind::kTanhPoly8, 2.0},
        {"linear3", 64, 64, ActKind::kTanhPoly8, 2.0},
    };
    c.head = {
        {"head1", 64, 64, ActKind::kReluCompG, 1.0},
        {"head2", 64, 64, ActKind::kReluCompG, 1.0},
        {"head3", 64, 1, ActKind::kIdentity, 1.0},
    };
    return c;
}

// --- activation math ---

namespace {
// f4/g4 odd degree-9 composite-sign polynomials over [-1, 1].
constexpr std::array<double, 10> kF4 = {0.0, 315.0 / 128, 0.0, -420.0 / 128, 0.0,
                                        378.0 / 128, 0.0, -180.0 / 128, 0.0, 35.0 / 128};
constexpr std::array<double, 10> kG4 = {0.0, 5850.0 / 1024, 0.0, -34974.0 / 1024, 0.0,
                                        97015.0 / 1024, 0.0, -113492.0 / 1024, 0.0, 46623.0 / 1024};
}  // namespace

std::span<const double> compg_f_coeffs() { return {kF4.data(), kF4.size()}; }
std::span<const double> compg_g_coeffs() { return {kG4.data(), kG4.size()}; }

double poly_eval_powerform(std::span<const double> coeffs, double x) {
    // Power cache mirrors the encrypted evaluator: pow2 = x*x, pow3 = x*pow2,
    // pow4 = pow2*pow2, pow6 = pow2*pow4, pow8 = pow4*pow4; odd terms are
    // (c_k*x)*pow_{k-1}, even terms c_k*pow_k.
    double acc = coeffs.size() > 0 ? coeffs[0] : 0.0;
    if (coeffs.size() > 10) throw ConfigError("poly_eval_powerform: degree > 9 unsupported");
    double p2 = x * x;
    double p3 = x * p2;
    double p4 = p2 * p2;
    double p6 = p2 * p4;
    double p8 = p4 * p4;
    const double evens[] = {1.0, 0.0, p2, 0.0, p4, 0.0, p6, 0.0, p8, 0.0};
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0.0) continue;
        if (k % 2 == 1) {
            const double base[] = {1.0, 1.0, 0.0, p2, 0.0, p4, 0.0, p6, 0.0, p8};
            acc += (coeffs[k] * x) * base[k];
        } else {
            acc += coeffs[k] * evens[k];
        }
    }
    return acc;
}

double compg_sign_plain(double x, int d) {
    double y = x;
    for (int i = 0; i < d; ++i) y = poly_eval_powerform(compg_g_coeffs(), y);
    for (int i = 0; i < d; ++i) y = poly_eval_powerform(compg_f_coeffs(), y);
    return y;
}

double relu_compg_plain(double x, const ActivationSpec& spec) {
    const double s = spec.scale_factor;
    const double t = x / s;
    const double step = 0.5 * compg_sign_plain(t, spec.compg_depth) + 0.5;
    return step * t * s;
}

double tanh_poly_plain(double x, const ActivationSpec& spec) {
    const double t = spec.scale_factor > 2.0 ? x * (2.0 / spec.scale_factor) : x;
    return poly_eval_powerform({spec.tanh_coeffs.data(), spec.tanh_coeffs.size()}, t);
}

double apply_activation_plain(double x, const ActivationSpec& spec) {
    switch (spec.kind) {
        case ActKind::kReluCompG: return relu_compg_plain(x, spec);
        case ActKind::kTanhPoly8: return tanh_poly_plain(x, spec);
        case ActKind::kIdentity: return x;
    }
    return x;
}

double apply_activation_exact(double x, const ActivationSpec& spec) {
    switch (spec.kind) {
        case ActKind::kReluCompG: return x > 0.0 ? x : 0.0;
        case ActKind::kTanhPoly8: return std::tanh(spec.scale_factor > 2.0 ? x * (2.0 / spec.scale_factor) : x);
        case ActKind::kIdentity: return x;
    }
    return x;
}

namespace {

// Solve a small dense system in place (partial pivoting).
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
        x[i] = s / a[i][i];
    }
    return x;
}

}  // namespace

std::array<double, 9> fit_tanh_poly8() {
    // Remez exchange on the odd-power basis {t, t^3, t^5, t^7}, t = x/2,
    // over [0, 2]; odd symmetry covers the negative half.
    constexpr int kBasis = 4;
    constexpr int kRefs = kBasis + 1;
    const int grid_n = 4000;
    std::vector<double> grid(grid_n);
    for (int i = 0; i < grid_n; ++i) grid[i] = 2.0 * (i + 1) / grid_n;

    constexpr double kPi = 3.14159265358979323846;
    std::vector<double> refs(kRefs);
    for (int i = 0; i < kRefs; ++i) refs[i] = 2.0 * (0.5 - 0.5 * std::cos(kPi * (i + 0.5) / kRefs));
    std::sort(refs.begin(), refs.end());
    refs[0] = std::max(refs[0], 1e-6);

    std::vector<double> coef(kBasis, 0.0);
    for (int iter = 0; iter < 40; ++iter) {
        std::vector<std::vector<double>> a(kRefs, std::vector<double>(kRefs));
        std::vector<double> rhs(kRefs);
        for (int i = 0; i < kRefs; ++i) {
            const double t = refs[i] / 2.0;
            for (int j = 0; j < kBasis; ++j) a[i][j] = std::pow(t, 2 * j + 1);
            a[i][kBasis] = (i % 2 == 0) ? 1.0 : -1.0;
            rhs[i] = std::tanh(refs[i]);
        }
        auto sol = solve_dense(std::move(a), std::move(rhs));
        std::copy(sol.begin(), sol.begin() + kBasis, coef.begin());

        auto err_at = [&](double x) {
            const double t = x / 2.0;
            double p = 0.0;
            for (int j = 0; j < kBasis; ++j) p += coef[j] * std::pow(t, 2 * j + 1);
            return p - std::tanh(x);
        };
        std::vector<double> err(grid_n);
        for (int i = 0; i < grid_n; ++i) err[i] = err_at(grid[i]);

        // local extrema with enforced sign alternation
        std::vector<int> ext{0};
        for (int i = 1; i < grid_n - 1; ++i)
            if ((err[i] - err[i - 1]) * (err[i + 1] - err[i]) <= 0.0) ext.push_back(i);
        ext.push_back(grid_n - 1);
        std::vector<int> sel;
        for (int i : ext) {
            if (!sel.empty() && std::signbit(err[i]) == std::signbit(err[sel.back()])) {
                if (std::abs(err[i]) > std::abs(err[sel.back()])) sel.back() = i;
            } else {
                sel.push_back(i);
            }
        }
        if (static_cast<int>(sel.size()) > kRefs) {
            int best = 0;
            double best_min = -1.0;
            for (std::size_t s = 0; s + kRefs <= sel.size(); ++s) {
                double mn = 1e300;
                for (int k = 0; k < kRefs; ++k) mn = std::min(mn, std::abs(err[sel[s + k]]));
                if (mn > best_min) {
                    best_min = mn;
                    best = static_cast<int>(s);
                }
            }
            sel.assign(sel.begin() + best, sel.begin() + best + kRefs);
        }
        if (static_cast<int>(sel.size()) == kRefs)
            for (int i = 0; i < kRefs; ++i) refs[i] = grid[sel[i]];
    }

    std::array<double, 9> out{};
    for (int j = 0; j < kBasis; ++j) out[2 * j + 1] = coef[j] / std::pow(2.0, 2 * j + 1);
    return out;
}

}  // namespace fhenet
