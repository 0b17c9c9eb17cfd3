#pragma once

// File formats: chunk CSV (header row, one numeric column per feature,
// optional trailing integer "label" column) and the JSON stream manifest
// (ordered list of {chunk_path, drift_label}). Doubles are serialized with
// shortest round-trip formatting so written values parse back bit-identical.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "icd3/chunk.hpp"

namespace icd3 {

// Unreadable or malformed input data; the CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("bad numeric field: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline RawTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    RawTable table;
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    table.columns = split_csv_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != table.columns.size())
            throw DataError(path + ": row with " + std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(table.columns.size()));
        table.rows.push_back(std::move(fields));
    }
    return table;
}

struct ChunkCsv {
    Chunk chunk;
    std::vector<int> labels;  // class ids; empty when no label column
};

inline ChunkCsv read_chunk_csv(const std::string& path, int chunk_index = 0) {
    const RawTable table = read_csv_table(path);
    if (table.columns.empty()) throw DataError(path + ": no columns");
    const bool has_label = table.columns.back() == "label";
    const std::size_t d = table.columns.size() - (has_label ? 1 : 0);
    if (d == 0) throw DataError(path + ": no feature columns");
    ChunkCsv out;
    out.chunk.chunk_index = chunk_index;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        Sample s;
        s.id = static_cast<int>(r);
        s.features.reserve(d);
        for (std::size_t c = 0; c < d; ++c) {
            const double v = parse_double(table.rows[r][c]);
            if (!std::isfinite(v)) throw DataError(path + ": non-finite value in row " + std::to_string(r));
            s.features.push_back(v);
        }
        if (has_label) out.labels.push_back(static_cast<int>(parse_double(table.rows[r][d])));
        out.chunk.samples.push_back(std::move(s));
    }
    if (out.chunk.samples.empty()) throw DataError(path + ": no data rows");
    return out;
}

inline void write_chunk_csv(const std::string& path, const Chunk& chunk, const std::vector<int>& labels = {}) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    const std::size_t d = chunk.dim();
    for (std::size_t j = 0; j < d; ++j) out << "f" << j << (j + 1 < d ? "," : "");
    if (!labels.empty()) out << ",label";
    out << "\n";
    for (std::size_t h = 0; h < chunk.size(); ++h) {
        const Sample& s = chunk.samples[h];
        for (std::size_t j = 0; j < d; ++j) out << fmt_double(s.features[j]) << (j + 1 < d ? "," : "");
        if (!labels.empty()) out << "," << labels[h];
        out << "\n";
    }
}

struct ManifestEntry {
    std::string chunk_path;
    bool drift_label = false;
};

inline void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
    nlohmann::json j = nlohmann::json::array();
    for (const ManifestEntry& e : entries)
        j.push_back({{"chunk_path", e.chunk_path}, {"drift_label", e.drift_label}});
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << "\n";
}

inline std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    if (!j.is_array()) throw DataError(path + ": manifest must be a JSON array");
    std::vector<ManifestEntry> entries;
    for (const auto& item : j)
        entries.push_back({item.at("chunk_path").get<std::string>(), item.at("drift_label").get<bool>()});
    return entries;
}

// Loads the chunks a manifest points at; relative paths resolve against the
// manifest's directory.
inline std::vector<Chunk> load_stream(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    const fs::path base = fs::path(manifest_path).parent_path();
    std::vector<Chunk> chunks;
    const auto entries = read_manifest(manifest_path);
    for (std::size_t t = 0; t < entries.size(); ++t) {
        fs::path p(entries[t].chunk_path);
        if (p.is_relative()) p = base / p;
        ChunkCsv cc = read_chunk_csv(p.string(), static_cast<int>(t));
        cc.chunk.drift_label = entries[t].drift_label;
        chunks.push_back(std::move(cc.chunk));
    }
    if (chunks.empty()) throw DataError(manifest_path + ": empty manifest");
    const std::size_t d = chunks.front().dim();
    for (const Chunk& c : chunks)
        if (c.dim() != d) throw DataError(manifest_path + ": chunks with mixed dimensionality");
    return chunks;
}

}  // namespace icd3
