#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <type_traits>
#include <ostream>
#include <string>
#include <vector>

#include "flow714/core/errors.hpp"

// Little-endian binary stream helpers shared by the file formats
// (latent caches, checkpoints, HRIR fixtures, embedding imports).

namespace flow714::binio {

inline void write_bytes(std::ostream& os, const void* data, size_t len) {
    os.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    if (!os) throw DataError("binio: write failed");
}

inline void read_bytes(std::istream& is, void* data, size_t len, const char* what) {
    is.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    if (static_cast<size_t>(is.gcount()) != len) {
        throw DataError(std::string("binio: truncated read of ") + what);
    }
}

template <typename T>
void write_le(std::ostream& os, T value) {
    static_assert(std::is_arithmetic_v<T>);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    // Host is assumed little-endian (x86/ARM64); formats are defined LE.
    write_bytes(os, buf, sizeof(T));
}

template <typename T>
T read_le(std::istream& is, const char* what) {
    unsigned char buf[sizeof(T)];
    read_bytes(is, buf, sizeof(T), what);
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

inline void write_magic(std::ostream& os, const char magic[4]) {
    write_bytes(os, magic, 4);
}

inline void expect_magic(std::istream& is, const char magic[4], const char* format_name) {
    char buf[4];
    read_bytes(is, buf, 4, "magic");
    if (std::memcmp(buf, magic, 4) != 0) {
        throw DataError(std::string("not a ") + format_name + " file (bad magic)");
    }
}

}  // namespace flow714::binio
