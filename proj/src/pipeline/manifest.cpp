#include "flow714/pipeline/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "flow714/core/crc32.hpp"
#include "flow714/core/errors.hpp"

namespace flow714 {

namespace {
constexpr char kHeader[] =
    "id\tpath_714\tpath_stereo\tpath_latent_714\tpath_latent_stereo\tduration\tchecksum";
}

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

bool is_test_clip(const std::string& id) { return fnv1a64(id) % 10 == 9; }

uint32_t file_crc32(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("checksum: cannot open " + path);
    Crc32 crc;
    char buf[1 << 16];
    while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
        crc.update(buf, static_cast<size_t>(f.gcount()));
        if (f.eof()) break;
    }
    return crc.value();
}

uint32_t entry_checksum(const std::string& base_dir, const ManifestEntry& entry) {
    const std::filesystem::path base(base_dir);
    uint32_t parts[4] = {
        file_crc32((base / entry.path_714).string()),
        file_crc32((base / entry.path_stereo).string()),
        file_crc32((base / entry.path_latent_714).string()),
        file_crc32((base / entry.path_latent_stereo).string()),
    };
    return crc32_of(parts, sizeof(parts));
}

void DatasetManifest::save(const std::string& path) const {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("manifest: cannot open " + path);
    f << kHeader << '\n';
    for (const ManifestEntry& e : entries) {
        char dur[32], crc[16];
        std::snprintf(dur, sizeof(dur), "%.6f", e.duration_s);
        std::snprintf(crc, sizeof(crc), "%08x", e.checksum);
        f << e.id << '\t' << e.path_714 << '\t' << e.path_stereo << '\t' << e.path_latent_714
          << '\t' << e.path_latent_stereo << '\t' << dur << '\t' << crc << '\n';
    }
    if (!f) throw DataError("manifest: write failed: " + path);
}

DatasetManifest DatasetManifest::load(const std::string& path, bool verify) {
    std::ifstream f(path);
    if (!f) throw DataError("manifest: cannot open " + path);
    const std::string base_dir = std::filesystem::path(path).parent_path().string();

    DatasetManifest m;
    std::string line;
    if (!std::getline(f, line) || line != kHeader) {
        throw DataError("manifest: missing or wrong header row: " + path);
    }
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream is(line);
        ManifestEntry e;
        std::string dur, crc;
        if (!std::getline(is, e.id, '\t') || !std::getline(is, e.path_714, '\t') ||
            !std::getline(is, e.path_stereo, '\t') ||
            !std::getline(is, e.path_latent_714, '\t') ||
            !std::getline(is, e.path_latent_stereo, '\t') || !std::getline(is, dur, '\t') ||
            !std::getline(is, crc)) {
            throw DataError("manifest: malformed row: " + line);
        }
        e.duration_s = std::stod(dur);
        e.checksum = static_cast<uint32_t>(std::stoul(crc, nullptr, 16));
        m.entries.push_back(std::move(e));
    }
    if (verify) {
        for (const ManifestEntry& e : m.entries) {
            const uint32_t actual = entry_checksum(base_dir, e);
            if (actual != e.checksum) {
                throw DataError("manifest: checksum mismatch for clip '" + e.id + "'");
            }
        }
    }
    return m;
}

}  // namespace flow714
