#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qca/statevec.hpp"

namespace qca {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Deterministic float formatting so identical runs produce byte-identical
// files.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// shot files: '#'-prefixed metadata header, then one bitstring per line

inline void write_shots(const std::string& path, const ShotEnsemble& e) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# step=" << e.meta.time_step << " angle=" << format_double(e.meta.basis_angle)
        << " seed=" << e.meta.seed;
    if (!e.meta.flags.empty()) out << " flags=" << e.meta.flags;
    out << "\n";
    for (const auto& b : e.bitstrings) out << b << "\n";
}

inline ShotEnsemble read_shots(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    ShotEnsemble e;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tok;
            while (hs >> tok) {
                auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "step") e.meta.time_step = std::stoi(val);
                if (key == "angle") e.meta.basis_angle = std::stod(val);
                if (key == "seed") e.meta.seed = std::stoull(val);
                if (key == "flags") e.meta.flags = val;
            }
            continue;
        }
        for (char c : line)
            if (c != '0' && c != '1')
                throw std::runtime_error("bad character in shot file " + path);
        if (!e.bitstrings.empty() && line.size() != e.bitstrings.front().size())
            throw std::runtime_error("ragged bitstrings in shot file " + path);
        e.bitstrings.push_back(line);
    }
    return e;
}

// ---------------------------------------------------------------------------
// CSV tables

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::initializer_list<std::string> cells) { rows.emplace_back(cells); }
};

inline void write_csv(const std::string& path, const CsvTable& t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < t.header.size(); ++i)
        out << t.header[i] << (i + 1 < t.header.size() ? "," : "");
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
        } else {
            t.rows.push_back(cells);
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// run manifest

// FNV-1a over the canonical config text; recorded in the manifest so runs
// can be compared for compatibility.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline void write_manifest(const std::string& dir, const std::string& experiment,
                           const std::string& engine, std::uint64_t seed,
                           std::uint64_t config_hash) {
    nlohmann::json m;
    m["experiment"] = experiment;
    m["engine"] = engine;
    m["seed"] = seed;
    m["config_hash"] = config_hash;
    m["library_version"] = kLibraryVersion;
    std::ofstream out(dir + "/manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir);
    out << m.dump(2) << "\n";
}

inline nlohmann::json read_manifest(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) throw std::runtime_error("cannot open manifest in " + dir);
    nlohmann::json m;
    in >> m;
    return m;
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace qca
