#include "mobsim/proto/packet.hpp"

#include <array>

#include "mobsim/proto/checksum.hpp"

namespace mobsim::proto {

namespace {
constexpr std::uint8_t kNextHeaderUdp = 17;
}

std::string_view to_string(MessageType t) {
  switch (t) {
    case MessageType::data: return "data";
    case MessageType::binding_update: return "BU";
    case MessageType::binding_ack: return "BA";
    case MessageType::home_test_init: return "HoTI";
    case MessageType::care_of_test_init: return "CoTI";
    case MessageType::home_test: return "HoT";
    case MessageType::care_of_test: return "CoT";
    case MessageType::listener_report: return "MLD-report";
  }
  return "?";
}

const Ipv6Addr& pseudo_source(const Packet& p) { return p.hao ? *p.hao : p.src; }
const Ipv6Addr& pseudo_destination(const Packet& p) { return p.rh2 ? *p.rh2 : p.dst; }

namespace {

std::uint16_t pseudo_sum(const Packet& p) {
  // src(16) dst(16) upper-layer length(4) zero(3) next header(1)
  std::array<std::uint8_t, 40> ph{};
  const auto& s = pseudo_source(p).bytes();
  const auto& d = pseudo_destination(p).bytes();
  std::copy(s.begin(), s.end(), ph.begin());
  std::copy(d.begin(), d.end(), ph.begin() + 16);
  const auto len = static_cast<std::uint32_t>(p.payload.size() + 8);  // UDP header
  ph[32] = static_cast<std::uint8_t>(len >> 24);
  ph[33] = static_cast<std::uint8_t>(len >> 16);
  ph[34] = static_cast<std::uint8_t>(len >> 8);
  ph[35] = static_cast<std::uint8_t>(len);
  ph[39] = kNextHeaderUdp;
  // UDP length field repeats the upper-layer length.
  return ones_add(ones_sum(ph), len & 0xffff);
}

}  // namespace

std::uint16_t compute_checksum(const Packet& p) {
  const std::uint16_t sum = ones_add(pseudo_sum(p), ones_sum(p.payload));
  const auto c = static_cast<std::uint16_t>(~sum);
  return c == 0 ? 0xffff : c;
}

bool verify_checksum(const Packet& p) {
  return ones_add(ones_add(pseudo_sum(p), ones_sum(p.payload)), p.upper_checksum) == 0xffff;
}

void seal(Packet& p) { p.upper_checksum = compute_checksum(p); }

Packet rewrite_dest(Packet p, const Ipv6Addr& new_dst) {
  if (!p.rh2) throw NoRoutingHeader();
  p.dst = new_dst;
  return p;
}

Packet rewrite_src(Packet p, const Ipv6Addr& new_src) {
  if (!p.hao) throw NoHomeAddressOption();
  p.src = new_src;
  return p;
}

Packet encapsulate(Packet p, const Ipv6Addr& outer_src, const Ipv6Addr& outer_dst) {
  if (p.tunnel) throw AlreadyTunnelled();
  p.tunnel = TunnelHeader{outer_src, outer_dst};
  return p;
}

Packet decapsulate(Packet p) {
  if (!p.tunnel) throw NotTunnelled();
  p.tunnel.reset();
  return p;
}

const Ipv6Addr& routing_destination(const Packet& p) { return p.tunnel ? p.tunnel->outer_dst : p.dst; }

std::vector<std::uint8_t> make_payload(std::uint64_t seq, sim::SimTime sent_at, std::size_t size) {
  std::vector<std::uint8_t> out(std::max<std::size_t>(size, 16), 0);
  const auto ts = static_cast<std::uint64_t>(sim::us_of(sent_at));
  for (int i = 0; i < 8; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(seq >> (56 - 8 * i));
    out[static_cast<std::size_t>(8 + i)] = static_cast<std::uint8_t>(ts >> (56 - 8 * i));
  }
  for (std::size_t i = 16; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(i * 31 + seq);
  out.resize(size);
  return out;
}

}  // namespace mobsim::proto
