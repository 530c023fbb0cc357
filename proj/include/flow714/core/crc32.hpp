#pragma once

#include <cstddef>
#include <cstdint>

namespace flow714 {

// Incremental CRC-32 (IEEE 802.3, reflected, polynomial 0xEDB88320).
class Crc32 {
public:
    void update(const void* data, size_t len);
    uint32_t value() const { return state_ ^ 0xFFFFFFFFu; }

private:
    uint32_t state_ = 0xFFFFFFFFu;
};

uint32_t crc32_of(const void* data, size_t len);

}  // namespace flow714
