#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mobsim/proto/address.hpp"
#include "mobsim/sim/time.hpp"

namespace mobsim::proto {

enum class EntryKind { primary, previous };

struct BindingCacheEntry {
  Ipv6Addr key;
  Ipv6Addr coa;
  sim::SimTime expires{};
  EntryKind kind = EntryKind::primary;
  std::set<Ipv6Addr> multicast_groups;
};

/// Per-node binding cache keyed by home (or regional) address.
///
/// In dual-entry mode a new primary binding demotes the old one to
/// `previous` instead of replacing it. The previous entry lives until the
/// first packet arrives from the new care-of address, or until its safety
/// lifetime runs out.
class BindingCache {
 public:
  explicit BindingCache(bool dual_entries = false,
                        sim::Duration previous_lifetime = std::chrono::seconds{3});

  bool dual_entries() const { return dual_; }

  /// Lifetime zero removes every entry for `key`.
  void update(const Ipv6Addr& key, const Ipv6Addr& coa, sim::Duration lifetime, sim::SimTime now,
              EntryKind kind = EntryKind::primary);

  const BindingCacheEntry* primary(const Ipv6Addr& key, sim::SimTime now) const;
  const BindingCacheEntry* previous(const Ipv6Addr& key, sim::SimTime now) const;
  std::size_t entry_count(const Ipv6Addr& key, sim::SimTime now) const;

  /// True if `src` is the primary or previous care-of address for `key`.
  bool accepts_source(const Ipv6Addr& key, const Ipv6Addr& src, sim::SimTime now) const;
  /// Applies the eviction rule for a packet (src, hao=key). Returns true if
  /// a previous entry was dropped.
  bool observe_source(const Ipv6Addr& key, const Ipv6Addr& src, sim::SimTime now);

  /// Key whose live entry (primary or previous) binds `coa`.
  std::optional<Ipv6Addr> find_by_coa(const Ipv6Addr& coa, sim::SimTime now) const;

  /// Group records attach to the key's primary entry; no-op without one.
  bool add_group(const Ipv6Addr& key, const Ipv6Addr& group);
  void remove_group(const Ipv6Addr& key, const Ipv6Addr& group);
  std::vector<Ipv6Addr> keys_with_group(const Ipv6Addr& group, sim::SimTime now) const;
  bool has_group_members(const Ipv6Addr& group, sim::SimTime now) const;

  void expire(sim::SimTime now);
  std::size_t size() const { return slots_.size(); }

 private:
  struct Slot {
    std::optional<BindingCacheEntry> primary;
    std::optional<BindingCacheEntry> previous;
  };
  static bool live(const std::optional<BindingCacheEntry>& e, sim::SimTime now) { return e && e->expires > now; }

  bool dual_;
  sim::Duration previous_lifetime_;
  std::map<Ipv6Addr, Slot> slots_;
};

}  // namespace mobsim::proto
