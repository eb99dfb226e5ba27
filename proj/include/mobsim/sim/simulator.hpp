#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "mobsim/sim/time.hpp"

namespace mobsim::sim {

using EventId = std::uint64_t;

class PastTime : public std::logic_error {
 public:
  PastTime(SimTime requested, SimTime now);
};

/// Single-threaded discrete-event engine.
///
/// Events are ordered by (fire_time, insertion sequence). The sequence number
/// doubles as the event id.
class Simulator {
 public:
  using Action = std::function<void()>;
  using TraceHook = std::function<void(SimTime, EventId)>;

  SimTime now() const { return now_; }

  /// Throws PastTime if `at` precedes the current clock.
  EventId schedule(SimTime at, Action action);
  EventId schedule_in(Duration delay, Action action) { return schedule(now_ + delay, std::move(action)); }

  /// Returns false if the event already ran or was cancelled.
  bool cancel(EventId id);

  /// Executes every event with fire_time <= end, then sets the clock to `end`.
  std::size_t run_until(SimTime end);

  std::size_t pending() const { return queue_.size() - cancelled_.size(); }

  void set_trace(TraceHook hook) { trace_ = std::move(hook); }

 private:
  struct Entry {
    SimTime at;
    EventId seq;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  SimTime now_{};
  EventId next_seq_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_set<EventId> live_;
  std::unordered_set<EventId> cancelled_;
  TraceHook trace_;
};

}  // namespace mobsim::sim
