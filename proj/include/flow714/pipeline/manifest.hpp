#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace flow714 {

// One prepared clip: paired WAVs, pre-extracted latent caches, and a
// combined checksum over all four files. Paths are relative to the
// manifest's directory.
struct ManifestEntry {
    std::string id;
    std::string path_714;
    std::string path_stereo;
    std::string path_latent_714;
    std::string path_latent_stereo;
    double duration_s = 0.0;
    uint32_t checksum = 0;
};

// Line-oriented TSV with a fixed header row.
struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    void save(const std::string& path) const;
    // Verifies that every referenced file exists and the checksums match;
    // any mismatch aborts.
    static DatasetManifest load(const std::string& path, bool verify = true);
};

uint64_t fnv1a64(std::string_view s);

// Deterministic 90/10 split by clip id hash.
bool is_test_clip(const std::string& id);

uint32_t file_crc32(const std::string& path);

// Combined CRC over the four referenced files (in column order).
uint32_t entry_checksum(const std::string& base_dir, const ManifestEntry& entry);

}  // namespace flow714
