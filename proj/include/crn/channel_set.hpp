#pragma once

#include <bitset>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace crn {

/// Maximum number of licensed channels a ChannelSet can index. Generated
/// scenarios use 10; the set-packing reduction needs one fresh channel per
/// unit of weight, so the capacity is well above that.
inline constexpr std::size_t kMaxChannels = 128;

using Channel = unsigned;

/**
 * Fixed-width set of channel indices. All common-channel arithmetic in the
 * library is an intersection over these, so operations are word-parallel.
 */
class ChannelSet {
 public:
  ChannelSet() = default;

  ChannelSet(std::initializer_list<Channel> channels) {
    for (auto c : channels) insert(c);
  }

  explicit ChannelSet(const std::vector<Channel>& channels) {
    for (auto c : channels) insert(c);
  }

  /// {0, 1, ..., n-1}
  static ChannelSet full(std::size_t n) {
    if (n > kMaxChannels)
      throw std::out_of_range("channel count " + std::to_string(n) + " exceeds capacity");
    ChannelSet s;
    for (std::size_t c = 0; c < n; ++c) s.bits_.set(c);
    return s;
  }

  void insert(Channel c) {
    check(c);
    bits_.set(c);
  }

  void erase(Channel c) {
    check(c);
    bits_.reset(c);
  }

  bool contains(Channel c) const { return c < kMaxChannels && bits_.test(c); }
  std::size_t size() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }

  /// Largest index present plus one, 0 for the empty set.
  std::size_t extent() const {
    for (std::size_t c = kMaxChannels; c > 0; --c)
      if (bits_.test(c - 1)) return c;
    return 0;
  }

  std::vector<Channel> to_vector() const {
    std::vector<Channel> out;
    out.reserve(size());
    for (std::size_t c = 0; c < kMaxChannels; ++c)
      if (bits_.test(c)) out.push_back(static_cast<Channel>(c));
    return out;
  }

  ChannelSet& operator&=(const ChannelSet& o) {
    bits_ &= o.bits_;
    return *this;
  }
  ChannelSet& operator|=(const ChannelSet& o) {
    bits_ |= o.bits_;
    return *this;
  }
  /// Set difference.
  ChannelSet& operator-=(const ChannelSet& o) {
    bits_ &= ~o.bits_;
    return *this;
  }

  friend ChannelSet operator&(ChannelSet a, const ChannelSet& b) { return a &= b; }
  friend ChannelSet operator|(ChannelSet a, const ChannelSet& b) { return a |= b; }
  friend ChannelSet operator-(ChannelSet a, const ChannelSet& b) { return a -= b; }
  friend bool operator==(const ChannelSet&, const ChannelSet&) = default;

  bool is_subset_of(const ChannelSet& o) const { return (bits_ & ~o.bits_).none(); }

 private:
  static void check(Channel c) {
    if (c >= kMaxChannels)
      throw std::out_of_range("channel index " + std::to_string(c) + " exceeds capacity");
  }

  std::bitset<kMaxChannels> bits_;
};

inline ChannelSet common_channels(const ChannelSet& a, const ChannelSet& b) { return a & b; }

inline std::string to_string(const ChannelSet& s) {
  std::string out = "{";
  bool first = true;
  for (auto c : s.to_vector()) {
    if (!first) out += ",";
    out += std::to_string(c);
    first = false;
  }
  return out + "}";
}

}  // namespace crn
