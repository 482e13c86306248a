#pragma once
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mapping.hpp"

namespace mdqam {

inline constexpr int kMappingFormatVersion = 1;

// Mapping file: JSON object {m, N, format_version, entries, provenance, seed}.
// entries[label] is the vector of 1-based position-indexes for that decimal
// label; whitespace-insensitive by construction of the JSON parser.
inline void save_mapping(const MdMapping& map, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = kMappingFormatVersion;
    j["m"] = map.bits_per_symbol();
    j["N"] = map.dims();
    j["provenance"] = map.provenance();
    j["seed"] = map.seed();
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t l = 0; l < map.labels(); ++l) {
        nlohmann::json row = nlohmann::json::array();
        for (int t = 0; t < map.dims(); ++t) row.push_back(map.coord(l, t));
        entries.push_back(std::move(row));
    }
    j["entries"] = std::move(entries);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_mapping: cannot open " + path);
    out << j.dump(1) << '\n';
}

inline MdMapping load_mapping(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_mapping: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_mapping: malformed JSON in " + path + ": " + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != kMappingFormatVersion)
            throw std::runtime_error("unsupported format_version");
        int m = j.at("m").get<int>();
        int n = j.at("N").get<int>();
        const auto& entries = j.at("entries");
        std::size_t labels = std::size_t{1} << (m * n);
        if (entries.size() != labels) throw std::runtime_error("wrong number of entries");
        std::vector<std::uint8_t> idx(labels * static_cast<std::size_t>(n));
        for (std::size_t l = 0; l < labels; ++l) {
            const auto& row = entries.at(l);
            if (row.size() != static_cast<std::size_t>(n)) throw std::runtime_error("bad entry arity");
            for (int t = 0; t < n; ++t) {
                int v = row.at(static_cast<std::size_t>(t)).get<int>();
                idx[l * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)] =
                    static_cast<std::uint8_t>(v);
            }
        }
        std::string prov = j.value("provenance", std::string("unknown"));
        std::uint64_t seed = j.value("seed", std::uint64_t{0});
        // MdMapping validates the position-index range and bijectivity
        return MdMapping(m, n, std::move(idx), prov, seed);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_mapping: invalid mapping file " + path + ": " + e.what());
    }
}

// FNV-1a content hash of a file, for reproducibility sidecars
inline std::string content_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("content_hash: cannot open " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace mdqam
