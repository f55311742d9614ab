// Copyright (c) 2026 fhenet authors
// SPDX-License-Identifier: Apache-2.0
#include "fhenet/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fhenet::report {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json cost_to_json(const CostSnapshot& c) {
    ordered_json j;
    for (std::size_t i = 0; i < c.counts.size(); ++i) j[op_kind_name(static_cast<OpKind>(i))] = c.counts[i];
    return j;
}

CostSnapshot cost_from_json(const ordered_json& j) {
    CostSnapshot c;
    for (std::size_t i = 0; i < c.counts.size(); ++i) c.counts[i] = j.at(op_kind_name(static_cast<OpKind>(i))).get<std::uint64_t>();
    return c;
}

}  // namespace

std::string ParityReport::to_json() const {
    ordered_json j;
    j["backend"] = backend;
    j["noise"] = noise;
    j["rotsum"] = rotsum;
    j["seed"] = seed;
    j["n_inputs"] = n_inputs;
    j["bypass_activations"] = bypass_activations;
    j["tolerances"] = ordered_json{{"block_mae", tol.block_mae}, {"poly_mae", tol.poly_mae}, {"min_r2", tol.min_r2}};
    j["blocks"] = ordered_json::array();
    for (const auto& b : blocks) {
        j["blocks"].push_back(ordered_json{{"name", b.name},
                                           {"mae_vs_exact", b.mae_vs_exact},
                                           {"mae_vs_poly", b.mae_vs_poly},
                                           {"levels_used", b.levels_used},
                                           {"ops", cost_to_json(b.cost)},
                                           {"wall_s", b.wall_s}});
    }
    j["r2"] = r2;
    j["r2_valid"] = r2_valid;
    j["passed"] = passed;
    j["total_wall_s"] = total_wall_s;
    return j.dump(1);
}

ParityReport ParityReport::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    ParityReport r;
    r.backend = j.at("backend").get<std::string>();
    r.noise = j.at("noise").get<std::string>();
    r.rotsum = j.at("rotsum").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n_inputs = j.at("n_inputs").get<int>();
    r.bypass_activations = j.at("bypass_activations").get<bool>();
    r.tol.block_mae = j.at("tolerances").at("block_mae").get<double>();
    r.tol.poly_mae = j.at("tolerances").at("poly_mae").get<double>();
    r.tol.min_r2 = j.at("tolerances").at("min_r2").get<double>();
    for (const auto& b : j.at("blocks")) {
        BlockReport br;
        br.name = b.at("name").get<std::string>();
        br.mae_vs_exact = b.at("mae_vs_exact").get<double>();
        br.mae_vs_poly = b.at("mae_vs_poly").get<double>();
        br.levels_used = b.at("levels_used").get<int>();
        br.cost = cost_from_json(b.at("ops"));
        br.wall_s = b.at("wall_s").get<double>();
        r.blocks.push_back(std::move(br));
    }
    r.r2 = j.at("r2").get<double>();
    r.r2_valid = j.at("r2_valid").get<bool>();
    r.passed = j.at("passed").get<bool>();
    r.total_wall_s = j.at("total_wall_s").get<double>();
    return r;
}

void ParityReport::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write report: " + path);
    out << to_json() << "\n";
}

bool ParityReport::same_modulo_time(const ParityReport& other) const {
    auto strip = [](const ParityReport& r) {
        ordered_json j = ordered_json::parse(r.to_json());
        j.erase("total_wall_s");
        for (auto& b : j.at("blocks")) b.erase("wall_s");
        return j;
    };
    return strip(*this) == strip(other);
}

ParityReport assemble(const std::string& backend, const std::vector<pipeline::EncryptedRun>& runs,
                      const std::vector<ref::BlockTrace>& exact, const std::vector<ref::BlockTrace>& poly,
                      const Tolerances& tol) {
    if (runs.empty() || runs.size() != exact.size() || runs.size() != poly.size())
        throw ShapeError("assemble: run/reference count mismatch");
    ParityReport rep;
    rep.backend = backend;
    rep.n_inputs = static_cast<int>(runs.size());
    rep.tol = tol;

    const auto& first = runs.front();
    const std::size_t n_blocks = first.blocks.size();
    for (std::size_t b = 0; b < n_blocks; ++b) {
        BlockReport br;
        br.name = first.blocks[b].name;
        br.levels_used = first.blocks[b].level_in - first.blocks[b].level_out;
        br.cost = first.blocks[b].cost;
        double sum_exact = 0.0, sum_poly = 0.0, sum_wall = 0.0, total_wall = 0.0;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto& out = runs[i].blocks.at(b).output;
            sum_exact += ref::mae(out.data, exact[i].block(br.name).data);
            sum_poly += ref::mae(out.data, poly[i].block(br.name).data);
            sum_wall += runs[i].blocks.at(b).wall_s;
            total_wall += runs[i].total_wall_s;
        }
        br.mae_vs_exact = sum_exact / static_cast<double>(runs.size());
        br.mae_vs_poly = sum_poly / static_cast<double>(runs.size());
        br.wall_s = sum_wall / static_cast<double>(runs.size());
        rep.blocks.push_back(std::move(br));
        rep.total_wall_s = total_wall;
    }

    const bool reaches_head = first.blocks.back().name == "head";
    if (reaches_head && runs.size() >= 2) {
        std::vector<double> pred, truth;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            pred.push_back(runs[i].blocks.back().output.data.at(0));
            truth.push_back(exact[i].output().data.at(0));
        }
        rep.r2 = ref::r_squared(pred, truth);
        rep.r2_valid = true;
    }

    rep.passed = true;
    for (const auto& b : rep.blocks) {
        if (b.mae_vs_exact > tol.block_mae) rep.passed = false;
        if (b.mae_vs_poly > tol.poly_mae) rep.passed = false;
    }
    if (rep.r2_valid && rep.r2 < tol.min_r2) rep.passed = false;
    return rep;
}

}  // namespace fhenet::report
