#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eudrl/metrics.hpp"
#include "eudrl/segment.hpp"

namespace eudrl {

// 12 significant digits, shortest form; all CSV output goes through here so
// identical inputs produce byte-identical files.
inline std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = "n,rmsve,sup_dist,j\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n);
        out += ',';
        out += format_g12(r.rmsve);
        out += ',';
        out += format_g12(r.sup_dist);
        out += ',';
        out += format_g12(r.j);
        out += '\n';
    }
    return out;
}

// Combined sweep table: the per-alpha metric rows stacked with a leading
// alpha column, alphas in the order given.
inline std::string sweep_csv(const std::vector<std::pair<double, std::vector<MetricsRow>>>& runs) {
    std::string out = "alpha,n,rmsve,sup_dist,j\n";
    for (const auto& [alpha, rows] : runs)
        for (const auto& r : rows) {
            out += format_g12(alpha);
            out += ',';
            out += std::to_string(r.n);
            out += ',';
            out += format_g12(r.rmsve);
            out += ',';
            out += format_g12(r.sup_dist);
            out += ',';
            out += format_g12(r.j);
            out += '\n';
        }
    return out;
}

// One line per accepted training segment, for offline inspection.
inline std::string segments_csv(const std::vector<Segment>& segments, const GoalMap& goal_map) {
    std::string out = "l,s0,h0,g0,a0,s_final,g_realized\n";
    for (const auto& seg : segments) {
        out += std::to_string(seg.length);
        out += ',';
        out += std::to_string(seg.s0);
        out += ',';
        out += std::to_string(seg.h0);
        out += ',';
        out += std::to_string(seg.g0);
        out += ',';
        out += std::to_string(seg.actions[0]);
        out += ',';
        out += std::to_string(seg.final_state());
        out += ',';
        out += std::to_string(goal_map.rho[seg.final_state()]);
        out += '\n';
    }
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace eudrl
