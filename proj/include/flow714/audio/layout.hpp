#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace flow714 {

struct Channel {
    std::string name;
    double azimuth_deg = 0.0;    // counterclockwise from front, (-180, 180]
    double elevation_deg = 0.0;  // up from horizon, [-90, 90]
    bool is_lfe = false;
};

// Ordered loudspeaker layout. The 7.1.4 layout is fixed to the order
// L, R, C, LFE, Lss, Rss, Lrs, Rrs, Ltf, Rtf, Ltb, Rtb with nominal
// ITU-R BS.2051 positions.
class ChannelLayout {
public:
    static ChannelLayout stereo();
    static ChannelLayout surround_7_1_4();
    // Unnamed layout for WAV files with other channel counts.
    static ChannelLayout generic(int64_t channels);

    int64_t channel_count() const { return static_cast<int64_t>(channels_.size()); }
    const Channel& channel(int64_t i) const { return channels_[static_cast<size_t>(i)]; }
    const std::vector<Channel>& channels() const { return channels_; }

    // Total on the layout's names; throws DataError for unknown names.
    int64_t index_of(const std::string& name) const;

    bool is_stereo() const;
    bool is_714() const;
    bool operator==(const ChannelLayout& other) const;

private:
    std::vector<Channel> channels_;
};

}  // namespace flow714
