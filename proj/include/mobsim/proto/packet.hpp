#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "mobsim/proto/address.hpp"
#include "mobsim/sim/time.hpp"
#include "mobsim/sim/topology.hpp"

namespace mobsim::proto {

class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};
class NoRoutingHeader : public ProtocolError {
 public:
  NoRoutingHeader() : ProtocolError("packet has no type-2 routing header; tunnel it instead") {}
};
class NoHomeAddressOption : public ProtocolError {
 public:
  NoHomeAddressOption() : ProtocolError("packet has no home address option") {}
};
class AlreadyTunnelled : public ProtocolError {
 public:
  AlreadyTunnelled() : ProtocolError("packet is already encapsulated") {}
};
class NotTunnelled : public ProtocolError {
 public:
  NotTunnelled() : ProtocolError("packet is not encapsulated") {}
};

enum class MessageType : std::uint8_t {
  data,
  binding_update,
  binding_ack,
  home_test_init,
  care_of_test_init,
  home_test,
  care_of_test,
  listener_report,
};

std::string_view to_string(MessageType t);
constexpr bool is_signaling(MessageType t) { return t != MessageType::data; }

/// Mobility or MLD message body. Tokens are opaque and not modelled.
struct Message {
  MessageType type = MessageType::data;
  Ipv6Addr binding_key;  // home address, or RCoA for a MAP registration
  Ipv6Addr care_of;
  sim::Duration lifetime{};
  std::uint32_t sequence = 0;
  bool home_registration = false;
  bool ack_requested = false;
  Ipv6Addr group;  // listener reports

  bool operator==(const Message&) const = default;
};

struct TunnelHeader {
  Ipv6Addr outer_src;
  Ipv6Addr outer_dst;

  bool operator==(const TunnelHeader&) const = default;
};

/// Simulated datagram. `rh2` is the type-2 routing header's final
/// destination, `hao` the home address destination option.
struct Packet {
  Ipv6Addr src;
  Ipv6Addr dst;
  std::optional<Ipv6Addr> rh2;
  std::optional<Ipv6Addr> hao;
  std::optional<TunnelHeader> tunnel;
  std::uint64_t seq = 0;
  sim::SimTime sent_at{};
  std::uint16_t upper_checksum = 0;
  std::vector<std::uint8_t> payload;
  Message msg;

  // Simulation bookkeeping, not wire content.
  std::uint32_t flow = 0;
  std::optional<sim::NodeId> via;  // last anchor (MAP/HA) that forwarded it
  bool echo = false;               // reflected probe

  bool operator==(const Packet&) const = default;
};

/// Source entering the pseudo-header: the home address option if present.
const Ipv6Addr& pseudo_source(const Packet& p);
/// Destination entering the pseudo-header: the routing header's final hop if present.
const Ipv6Addr& pseudo_destination(const Packet& p);

/// Upper-layer checksum over the pseudo-header and payload (UDP rules).
std::uint16_t compute_checksum(const Packet& p);
bool verify_checksum(const Packet& p);
/// Sets upper_checksum from the current headers.
void seal(Packet& p);

/// Replaces the IPv6 destination; the checksum stays valid because the
/// pseudo-header uses the routing header's address.
Packet rewrite_dest(Packet p, const Ipv6Addr& new_dst);
/// Replaces the IPv6 source; valid because the pseudo-header uses the HAO.
Packet rewrite_src(Packet p, const Ipv6Addr& new_src);

Packet encapsulate(Packet p, const Ipv6Addr& outer_src, const Ipv6Addr& outer_dst);
Packet decapsulate(Packet p);

/// Address used for routing decisions: outer destination when tunnelled.
const Ipv6Addr& routing_destination(const Packet& p);

/// Serialises (seq, sent_at) into the first 16 payload bytes and pads to `size`.
std::vector<std::uint8_t> make_payload(std::uint64_t seq, sim::SimTime sent_at, std::size_t size);

}  // namespace mobsim::proto
