#include "flow714/audio/layout.hpp"

#include "flow714/core/errors.hpp"

namespace flow714 {

ChannelLayout ChannelLayout::stereo() {
    ChannelLayout l;
    l.channels_ = {{"L", 30.0, 0.0, false}, {"R", -30.0, 0.0, false}};
    return l;
}

ChannelLayout ChannelLayout::surround_7_1_4() {
    ChannelLayout l;
    l.channels_ = {
        {"L", 30.0, 0.0, false},     {"R", -30.0, 0.0, false},
        {"C", 0.0, 0.0, false},      {"LFE", 0.0, -30.0, true},
        {"Lss", 90.0, 0.0, false},   {"Rss", -90.0, 0.0, false},
        {"Lrs", 135.0, 0.0, false},  {"Rrs", -135.0, 0.0, false},
        {"Ltf", 45.0, 45.0, false},  {"Rtf", -45.0, 45.0, false},
        {"Ltb", 135.0, 45.0, false}, {"Rtb", -135.0, 45.0, false},
    };
    return l;
}

ChannelLayout ChannelLayout::generic(int64_t channels) {
    if (channels == 2) return stereo();
    if (channels == 12) return surround_7_1_4();
    ChannelLayout l;
    for (int64_t i = 0; i < channels; ++i) {
        l.channels_.push_back({"ch" + std::to_string(i), 0.0, 0.0, false});
    }
    return l;
}

int64_t ChannelLayout::index_of(const std::string& name) const {
    for (size_t i = 0; i < channels_.size(); ++i) {
        if (channels_[i].name == name) return static_cast<int64_t>(i);
    }
    throw DataError("layout: no channel named '" + name + "'");
}

bool ChannelLayout::is_stereo() const { return *this == stereo(); }

bool ChannelLayout::is_714() const { return *this == surround_7_1_4(); }

bool ChannelLayout::operator==(const ChannelLayout& other) const {
    if (channels_.size() != other.channels_.size()) return false;
    for (size_t i = 0; i < channels_.size(); ++i) {
        const Channel& a = channels_[i];
        const Channel& b = other.channels_[i];
        if (a.name != b.name || a.azimuth_deg != b.azimuth_deg ||
            a.elevation_deg != b.elevation_deg || a.is_lfe != b.is_lfe) {
            return false;
        }
    }
    return true;
}

}  // namespace flow714
