#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mobsim::proto {

enum class AddressRole : std::uint8_t {
  plain,
  home,           // HoA
  on_link_coa,    // LCoA
  regional_coa,   // RCoA
  multicast_group,
};

std::string_view to_string(AddressRole role);

class AddressError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// 128-bit IPv6 address with prefix length and mobility role.
///
/// The role is metadata: equality and hashing cover the 128 address bits
/// only, so an LCoA and the same bits tagged plain compare equal.
class Ipv6Addr {
 public:
  using Bytes = std::array<std::uint8_t, 16>;

  Ipv6Addr() = default;
  /// Throws AddressError if the multicast role and the ff00::/8 prefix disagree.
  Ipv6Addr(const Bytes& bytes, std::uint8_t prefix_len, AddressRole role = AddressRole::plain);

  static Ipv6Addr parse(std::string_view text, AddressRole role = AddressRole::plain);
  /// Prefix bits from `prefix`, low 64 bits from `interface_id`.
  static Ipv6Addr from_prefix(const Ipv6Addr& prefix, std::uint64_t interface_id, AddressRole role);

  const Bytes& bytes() const { return bytes_; }
  std::uint8_t prefix_len() const { return prefix_len_; }
  AddressRole role() const { return role_; }
  bool is_multicast() const { return bytes_[0] == 0xff; }
  bool is_unspecified() const;
  std::uint64_t interface_id() const;

  /// True if the leading prefix_len() bits of this address match `other`.
  bool same_prefix(const Ipv6Addr& other) const;
  Ipv6Addr network() const;
  Ipv6Addr with_role(AddressRole role) const { return Ipv6Addr(bytes_, prefix_len_, role); }

  std::string str() const;

  friend bool operator==(const Ipv6Addr& a, const Ipv6Addr& b) { return a.bytes_ == b.bytes_; }
  friend std::strong_ordering operator<=>(const Ipv6Addr& a, const Ipv6Addr& b) { return a.bytes_ <=> b.bytes_; }

 private:
  Bytes bytes_{};
  std::uint8_t prefix_len_ = 128;
  AddressRole role_ = AddressRole::plain;
};

}  // namespace mobsim::proto

template <>
struct std::hash<mobsim::proto::Ipv6Addr> {
  std::size_t operator()(const mobsim::proto::Ipv6Addr& a) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto b : a.bytes()) h = (h ^ b) * 1099511628211ULL;
    return h;
  }
};
