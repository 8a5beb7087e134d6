#pragma once

// Run metadata written next to every CLI output bundle: what was run, with
// which seeds, and digests of every file read or written, so a run can be
// checked for byte-identical reproduction.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "rng.hpp"

namespace seqdec {

inline constexpr const char* kSpecVersion = "1.0.0";

inline std::uint64_t fnv1a64(const char* data, std::size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_digest: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    std::ostringstream out;
    out << "fnv1a64:" << std::hex << std::setfill('0') << std::setw(16)
        << fnv1a64(bytes.data(), bytes.size());
    return out.str();
}

struct RunManifest {
    std::string spec_version = kSpecVersion;
    std::string command;
    std::vector<std::uint64_t> seeds;
    std::vector<std::pair<std::string, std::string>> inputs;   // (file, digest)
    std::vector<std::pair<std::string, std::string>> outputs;  // (file, digest)
    double elapsed_seconds = 0.0;
    std::string rng_algorithm = kRngAlgorithm;

    void add_input(const std::string& path) { inputs.emplace_back(path, file_digest(path)); }
    void add_output(const std::string& path) { outputs.emplace_back(path, file_digest(path)); }
};

inline void write_manifest(std::ostream& os, const RunManifest& manifest) {
    nlohmann::json j;
    j["spec_version"] = manifest.spec_version;
    j["command"] = manifest.command;
    j["seeds"] = manifest.seeds;
    j["rng_algorithm"] = manifest.rng_algorithm;
    j["elapsed_seconds"] = manifest.elapsed_seconds;
    auto files = [](const std::vector<std::pair<std::string, std::string>>& entries) {
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& [path, digest] : entries) obj[path] = digest;
        return obj;
    };
    j["inputs"] = files(manifest.inputs);
    j["outputs"] = files(manifest.outputs);
    os << j.dump(2) << '\n';
}

inline void write_manifest_file(const std::string& path, const RunManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_manifest_file: cannot open " + path);
    write_manifest(out, manifest);
}

} // namespace seqdec
