#include <vector>

#include "doctest.h"
#include "mobsim/proto/binding_cache.hpp"
#include "mobsim/proto/checksum.hpp"
#include "mobsim/proto/packet.hpp"
#include "mobsim/sim/rng.hpp"

using namespace mobsim;
using namespace mobsim::proto;
using namespace std::chrono_literals;

namespace {

Ipv6Addr random_unicast(sim::Rng& rng) {
  Ipv6Addr::Bytes b{};
  for (auto& x : b) x = static_cast<std::uint8_t>(rng.below(256));
  b[0] = static_cast<std::uint8_t>(0x20 + rng.below(0x40));  // never ff00::/8
  return Ipv6Addr(b, 64);
}

std::vector<std::uint8_t> random_bytes(sim::Rng& rng, std::size_t n) {
  std::vector<std::uint8_t> v(n);
  for (auto& x : v) x = static_cast<std::uint8_t>(rng.below(256));
  return v;
}

/// Textbook RFC 1071 sum with a wide accumulator, one word at a time.
std::uint16_t reference_sum(const std::vector<std::uint8_t>& data) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < data.size(); i += 2) {
    const std::uint16_t hi = data[i];
    const std::uint16_t lo = i + 1 < data.size() ? data[i + 1] : 0;
    acc += static_cast<std::uint16_t>(hi << 8 | lo);
  }
  while (acc >> 16) acc = (acc & 0xffff) + (acc >> 16);
  return static_cast<std::uint16_t>(acc);
}

/// UDP checksum over the IPv6 pseudo-header built by hand.
std::uint16_t reference_udp_checksum(const Ipv6Addr& src, const Ipv6Addr& dst, const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> buf;
  buf.insert(buf.end(), src.bytes().begin(), src.bytes().end());
  buf.insert(buf.end(), dst.bytes().begin(), dst.bytes().end());
  const auto len = static_cast<std::uint32_t>(payload.size() + 8);
  for (int s : {24, 16, 8, 0}) buf.push_back(static_cast<std::uint8_t>(len >> s));
  buf.insert(buf.end(), {0, 0, 0, 17});
  // UDP header: ports zero, length, checksum zero.
  buf.insert(buf.end(), {0, 0, 0, 0, static_cast<std::uint8_t>(len >> 8), static_cast<std::uint8_t>(len), 0, 0});
  buf.insert(buf.end(), payload.begin(), payload.end());
  const auto c = static_cast<std::uint16_t>(~reference_sum(buf));
  return c == 0 ? 0xffff : c;
}

Packet random_packet(sim::Rng& rng) {
  Packet p;
  p.src = random_unicast(rng);
  p.dst = random_unicast(rng);
  if (rng.below(2)) p.rh2 = random_unicast(rng);
  if (rng.below(2)) p.hao = random_unicast(rng);
  p.seq = rng.next_u64();
  p.payload = random_bytes(rng, rng.below(300));
  seal(p);
  return p;
}

}  // namespace

TEST_CASE("every checksum kernel matches the reference sum") {
  sim::Rng rng(3);
  const auto kernels = available_kernels();
  REQUIRE(kernels.front() == ChecksumKernel::scalar);
  // Lengths around every vector width, including odd tails.
  for (std::size_t n = 0; n < 200; ++n) {
    const auto data = random_bytes(rng, n);
    const auto want = reference_sum(data);
    for (auto k : kernels) CHECK_MESSAGE(ones_sum(data, k) == want, to_string(k) << " len " << n);
  }
  for (int round = 0; round < 200; ++round) {
    const auto data = random_bytes(rng, 1 + rng.below(70'000));
    const auto want = reference_sum(data);
    for (auto k : kernels) REQUIRE(ones_sum(data, k) == want);
  }
  // All-ones input saturates every lane.
  const std::vector<std::uint8_t> ones(65'537, 0xff);
  for (auto k : kernels) CHECK(ones_sum(ones, k) == reference_sum(ones));
}

TEST_CASE("packet checksum equals a hand-built UDP pseudo-header checksum") {
  sim::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    Packet p = random_packet(rng);
    CHECK(p.upper_checksum == reference_udp_checksum(pseudo_source(p), pseudo_destination(p), p.payload));
    CHECK(verify_checksum(p));
  }
}

TEST_CASE("rewrite_dest keeps rh2, hao and checksum") {
  sim::Rng rng(5);
  Packet p;
  p.src = random_unicast(rng);
  p.dst = Ipv6Addr::parse("2001:db8:0:9::2");
  p.rh2 = Ipv6Addr::parse("2001:db8:0:1::7");
  p.payload = {1, 2, 3};
  seal(p);
  const auto c = p.upper_checksum;
  Packet q = rewrite_dest(p, Ipv6Addr::parse("2001:db8:0:4::2"));
  CHECK(q.dst == Ipv6Addr::parse("2001:db8:0:4::2"));
  CHECK(q.rh2 == p.rh2);
  CHECK(q.upper_checksum == c);
  CHECK(verify_checksum(q));
  CHECK(rewrite_dest(p, p.dst) == p);
  p.rh2.reset();
  CHECK_THROWS_AS(rewrite_dest(p, p.dst), NoRoutingHeader);
}

TEST_CASE("rewrite_src keeps hao and checksum") {
  Packet p;
  p.src = Ipv6Addr::parse("2001:db8:0:5::aa");
  p.dst = Ipv6Addr::parse("2001:db8:0:3::1");
  p.hao = Ipv6Addr::parse("2001:db8:0:1::aa");
  p.payload = {9, 9};
  seal(p);
  Packet q = rewrite_src(p, Ipv6Addr::parse("2001:db8:0:6::aa"));
  CHECK(q.hao == p.hao);
  CHECK(q.upper_checksum == p.upper_checksum);
  CHECK(verify_checksum(q));
  CHECK(rewrite_src(p, p.src) == p);
  p.hao.reset();
  CHECK_THROWS_AS(rewrite_src(p, p.src), NoHomeAddressOption);
}

TEST_CASE("without extension headers a rewrite would break the checksum") {
  // Control for the neutrality property: the plain header fields do enter
  // the pseudo-header.
  Packet p;
  p.src = Ipv6Addr::parse("2001:db8:0:5::aa");
  p.dst = Ipv6Addr::parse("2001:db8:0:3::1");
  p.payload = {1};
  seal(p);
  p.dst = Ipv6Addr::parse("2001:db8:0:4::1");
  CHECK_FALSE(verify_checksum(p));
}

TEST_CASE("tunnel round trip and depth limit") {
  sim::Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    const Packet p = random_packet(rng);
    const Packet t = encapsulate(p, random_unicast(rng), random_unicast(rng));
    CHECK(routing_destination(t) == t.tunnel->outer_dst);
    CHECK(decapsulate(t) == p);
    CHECK_THROWS_AS(encapsulate(t, p.src, p.dst), AlreadyTunnelled);
    CHECK_THROWS_AS(decapsulate(p), NotTunnelled);
  }
}

TEST_CASE("binding cache dual entries, removal and eviction") {
  const auto hoa = Ipv6Addr::parse("2001:db8:0:1::aa");
  const auto coa1 = Ipv6Addr::parse("2001:db8:0:5::aa");
  const auto coa2 = Ipv6Addr::parse("2001:db8:0:6::aa");
  const sim::SimTime t0{};

  BindingCache dual(true, 3s);
  dual.update(hoa, coa1, 420s, t0);
  dual.update(hoa, coa2, 420s, t0 + 1s);
  REQUIRE(dual.primary(hoa, t0 + 1s));
  CHECK(dual.primary(hoa, t0 + 1s)->coa == coa2);
  REQUIRE(dual.previous(hoa, t0 + 1s));
  CHECK(dual.previous(hoa, t0 + 1s)->coa == coa1);
  CHECK(dual.entry_count(hoa, t0 + 1s) == 2);
  CHECK(dual.accepts_source(hoa, coa1, t0 + 1s));

  // Traffic still using the old address does not evict it.
  CHECK_FALSE(dual.observe_source(hoa, coa1, t0 + 2s));
  CHECK(dual.observe_source(hoa, coa2, t0 + 2s));
  CHECK(dual.entry_count(hoa, t0 + 2s) == 1);
  CHECK_FALSE(dual.accepts_source(hoa, coa1, t0 + 2s));

  // Safety lifetime bounds a previous entry that never sees traffic.
  dual.update(hoa, coa1, 420s, t0 + 10s);
  CHECK(dual.entry_count(hoa, t0 + 12s) == 2);
  CHECK(dual.entry_count(hoa, t0 + 13s) == 1);

  dual.update(hoa, coa1, 0s, t0 + 20s);
  CHECK(dual.entry_count(hoa, t0 + 20s) == 0);
  CHECK(dual.primary(hoa, t0 + 20s) == nullptr);

  BindingCache single;
  single.update(hoa, coa1, 420s, t0);
  single.update(hoa, coa2, 420s, t0);
  CHECK(single.entry_count(hoa, t0) == 1);
  CHECK(single.primary(hoa, t0)->coa == coa2);
}

TEST_CASE("group records follow the key across updates") {
  const auto rcoa = Ipv6Addr::parse("2001:db8:0:7::aa");
  const auto g = Ipv6Addr::parse("ff0e::1");
  BindingCache c;
  CHECK_FALSE(c.add_group(rcoa, g));
  c.update(rcoa, Ipv6Addr::parse("2001:db8:0:5::aa"), 420s, {});
  CHECK(c.add_group(rcoa, g));
  c.update(rcoa, Ipv6Addr::parse("2001:db8:0:6::aa"), 420s, {});
  CHECK(c.keys_with_group(g, {}) == std::vector<Ipv6Addr>{rcoa});
  CHECK(c.find_by_coa(Ipv6Addr::parse("2001:db8:0:6::aa"), {}) == rcoa);
  c.remove_group(rcoa, g);
  CHECK_FALSE(c.has_group_members(g, {}));
}

TEST_CASE("address roles and prefixes") {
  const auto g = Ipv6Addr::parse("ff0e::101", AddressRole::multicast_group);
  CHECK(g.is_multicast());
  CHECK_THROWS_AS(Ipv6Addr::parse("2001:db8::1", AddressRole::multicast_group), AddressError);
  const auto prefix = Ipv6Addr::parse("2001:db8:0:4::/64");
  const auto lcoa = Ipv6Addr::from_prefix(prefix, 0x0200'0000'0000'0005ULL, AddressRole::on_link_coa);
  CHECK(lcoa.same_prefix(prefix));
  CHECK(lcoa.interface_id() == 0x0200'0000'0000'0005ULL);
  CHECK(lcoa == lcoa.with_role(AddressRole::plain));
}
