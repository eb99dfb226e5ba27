#include "mobsim/sim/simulator.hpp"

#include <string>

namespace mobsim::sim {

PastTime::PastTime(SimTime requested, SimTime now)
    : std::logic_error("event scheduled at " + std::to_string(us_of(requested)) + "us, before clock " +
                       std::to_string(us_of(now)) + "us") {}

EventId Simulator::schedule(SimTime at, Action action) {
  if (at < now_) throw PastTime(at, now_);
  const EventId id = next_seq_++;
  queue_.push(Entry{at, id, std::move(action)});
  live_.insert(id);
  return id;
}

bool Simulator::cancel(EventId id) {
  if (live_.erase(id) == 0) return false;
  cancelled_.insert(id);
  return true;
}

std::size_t Simulator::run_until(SimTime end) {
  std::size_t executed = 0;
  while (!queue_.empty() && queue_.top().at <= end) {
    // priority_queue::top is const; the entry is popped before running so the
    // action may schedule freely.
    Entry entry = std::move(const_cast<Entry&>(queue_.top()));
    queue_.pop();
    if (cancelled_.erase(entry.seq) != 0) continue;
    live_.erase(entry.seq);
    now_ = entry.at;
    if (trace_) trace_(now_, entry.seq);
    entry.action();
    ++executed;
  }
  if (end > now_) now_ = end;
  return executed;
}

}  // namespace mobsim::sim
