#include "mobsim/proto/address.hpp"

#include <arpa/inet.h>

#include <algorithm>

namespace mobsim::proto {

std::string_view to_string(AddressRole role) {
  switch (role) {
    case AddressRole::plain: return "plain";
    case AddressRole::home: return "HoA";
    case AddressRole::on_link_coa: return "LCoA";
    case AddressRole::regional_coa: return "RCoA";
    case AddressRole::multicast_group: return "group";
  }
  return "?";
}

Ipv6Addr::Ipv6Addr(const Bytes& bytes, std::uint8_t prefix_len, AddressRole role)
    : bytes_(bytes), prefix_len_(prefix_len), role_(role) {
  if (prefix_len > 128) throw AddressError("prefix length > 128");
  if ((role == AddressRole::multicast_group) != is_multicast())
    throw AddressError("multicast role requires an ff00::/8 address and vice versa: " + str());
}

Ipv6Addr Ipv6Addr::parse(std::string_view text, AddressRole role) {
  std::string s(text);
  std::uint8_t plen = 128;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const int v = std::stoi(s.substr(slash + 1));
    if (v < 0 || v > 128) throw AddressError("bad prefix length in '" + s + "'");
    plen = static_cast<std::uint8_t>(v);
    s.resize(slash);
  }
  Bytes b{};
  if (inet_pton(AF_INET6, s.c_str(), b.data()) != 1) throw AddressError("not an IPv6 address: '" + s + "'");
  if (role == AddressRole::plain && b[0] == 0xff) role = AddressRole::multicast_group;
  return Ipv6Addr(b, plen, role);
}

Ipv6Addr Ipv6Addr::from_prefix(const Ipv6Addr& prefix, std::uint64_t interface_id, AddressRole role) {
  Bytes b = prefix.bytes_;
  for (int i = 0; i < 8; ++i) b[15 - i] = static_cast<std::uint8_t>(interface_id >> (8 * i));
  return Ipv6Addr(b, prefix.prefix_len_, role);
}

bool Ipv6Addr::is_unspecified() const {
  return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t v) { return v == 0; });
}

std::uint64_t Ipv6Addr::interface_id() const {
  std::uint64_t v = 0;
  for (int i = 8; i < 16; ++i) v = (v << 8) | bytes_[i];
  return v;
}

bool Ipv6Addr::same_prefix(const Ipv6Addr& other) const {
  const int full = prefix_len_ / 8;
  for (int i = 0; i < full; ++i)
    if (bytes_[i] != other.bytes_[i]) return false;
  if (const int rem = prefix_len_ % 8; rem != 0) {
    const auto mask = static_cast<std::uint8_t>(0xff << (8 - rem));
    if ((bytes_[full] & mask) != (other.bytes_[full] & mask)) return false;
  }
  return true;
}

Ipv6Addr Ipv6Addr::network() const {
  Bytes b{};
  const int full = prefix_len_ / 8;
  std::copy_n(bytes_.begin(), full, b.begin());
  if (const int rem = prefix_len_ % 8; rem != 0) b[full] = bytes_[full] & static_cast<std::uint8_t>(0xff << (8 - rem));
  return Ipv6Addr(b, prefix_len_, b[0] == 0xff ? AddressRole::multicast_group : AddressRole::plain);
}

std::string Ipv6Addr::str() const {
  char buf[INET6_ADDRSTRLEN] = {};
  inet_ntop(AF_INET6, bytes_.data(), buf, sizeof buf);
  return buf;
}

}  // namespace mobsim::proto
