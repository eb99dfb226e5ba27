#include "mobsim/proto/binding_cache.hpp"

#include <algorithm>

namespace mobsim::proto {

BindingCache::BindingCache(bool dual_entries, sim::Duration previous_lifetime)
    : dual_(dual_entries), previous_lifetime_(previous_lifetime) {}

void BindingCache::update(const Ipv6Addr& key, const Ipv6Addr& coa, sim::Duration lifetime, sim::SimTime now,
                          EntryKind kind) {
  if (lifetime <= sim::Duration::zero()) {
    slots_.erase(key);
    return;
  }
  Slot& slot = slots_[key];
  BindingCacheEntry entry{key, coa, now + lifetime, kind, {}};
  if (kind == EntryKind::previous) {
    entry.expires = now + std::min(lifetime, previous_lifetime_);
    slot.previous = std::move(entry);
    return;
  }
  if (live(slot.primary, now)) {
    entry.multicast_groups = slot.primary->multicast_groups;
    if (slot.primary->coa == coa) {
      // Refresh of the same binding.
      slot.primary = std::move(entry);
      return;
    }
    if (dual_) {
      BindingCacheEntry demoted = std::move(*slot.primary);
      demoted.kind = EntryKind::previous;
      demoted.multicast_groups.clear();
      demoted.expires = std::min(demoted.expires, now + previous_lifetime_);
      slot.previous = std::move(demoted);
    }
  }
  if (slot.previous && slot.previous->coa == coa) slot.previous.reset();
  slot.primary = std::move(entry);
}

const BindingCacheEntry* BindingCache::primary(const Ipv6Addr& key, sim::SimTime now) const {
  auto it = slots_.find(key);
  if (it == slots_.end() || !live(it->second.primary, now)) return nullptr;
  return &*it->second.primary;
}

const BindingCacheEntry* BindingCache::previous(const Ipv6Addr& key, sim::SimTime now) const {
  auto it = slots_.find(key);
  if (it == slots_.end() || !live(it->second.previous, now)) return nullptr;
  return &*it->second.previous;
}

std::size_t BindingCache::entry_count(const Ipv6Addr& key, sim::SimTime now) const {
  return (primary(key, now) ? 1U : 0U) + (previous(key, now) ? 1U : 0U);
}

bool BindingCache::accepts_source(const Ipv6Addr& key, const Ipv6Addr& src, sim::SimTime now) const {
  const auto* p = primary(key, now);
  const auto* q = previous(key, now);
  return (p && p->coa == src) || (q && q->coa == src);
}

bool BindingCache::observe_source(const Ipv6Addr& key, const Ipv6Addr& src, sim::SimTime now) {
  auto it = slots_.find(key);
  if (it == slots_.end()) return false;
  Slot& slot = it->second;
  if (live(slot.primary, now) && slot.primary->coa == src && slot.previous) {
    slot.previous.reset();
    return true;
  }
  return false;
}

std::optional<Ipv6Addr> BindingCache::find_by_coa(const Ipv6Addr& coa, sim::SimTime now) const {
  for (const auto& [key, slot] : slots_) {
    if (live(slot.primary, now) && slot.primary->coa == coa) return key;
  }
  for (const auto& [key, slot] : slots_) {
    if (live(slot.previous, now) && slot.previous->coa == coa) return key;
  }
  return std::nullopt;
}

bool BindingCache::add_group(const Ipv6Addr& key, const Ipv6Addr& group) {
  auto it = slots_.find(key);
  if (it == slots_.end() || !it->second.primary) return false;
  it->second.primary->multicast_groups.insert(group);
  return true;
}

void BindingCache::remove_group(const Ipv6Addr& key, const Ipv6Addr& group) {
  auto it = slots_.find(key);
  if (it != slots_.end() && it->second.primary) it->second.primary->multicast_groups.erase(group);
}

std::vector<Ipv6Addr> BindingCache::keys_with_group(const Ipv6Addr& group, sim::SimTime now) const {
  std::vector<Ipv6Addr> out;
  for (const auto& [key, slot] : slots_)
    if (live(slot.primary, now) && slot.primary->multicast_groups.contains(group)) out.push_back(key);
  return out;
}

bool BindingCache::has_group_members(const Ipv6Addr& group, sim::SimTime now) const {
  return !keys_with_group(group, now).empty();
}

void BindingCache::expire(sim::SimTime now) {
  for (auto it = slots_.begin(); it != slots_.end();) {
    Slot& s = it->second;
    if (!live(s.primary, now)) s.primary.reset();
    if (!live(s.previous, now)) s.previous.reset();
    if (!s.primary && !s.previous)
      it = slots_.erase(it);
    else
      ++it;
  }
}

}  // namespace mobsim::proto
