#ifndef SKYLISTEN_TRIGGER_MONITOR_H_
#define SKYLISTEN_TRIGGER_MONITOR_H_

#include <functional>
#include <optional>

#include "skylisten/adsb/modes.h"
#include "skylisten/adsb/stream.h"
#include "skylisten/airtrack/tracker.h"
#include "skylisten/trigger/trigger.h"
#include "skylisten/util/datetime.h"

namespace skylisten::trigger {

// Drives tracker + trigger over a time-ordered message stream. Snapshots are
// taken on the logical grid 0, P, 2P, ... (P = snapshot_period_s); a
// snapshot at time T sees every message stamped before T. Actions reach the
// sink in emission order.
class MonitorLoop {
 public:
  using ActionSink = std::function<void(const Action&)>;

  MonitorLoop(TriggerConfig config, airtrack::TrackerConfig tracker_config,
              util::CivilTime wall_origin, ActionSink sink);

  void OnFrame(const adsb::ModeSFrame& frame, double t_s);
  void OnSbs(const adsb::SbsMessage& msg, double t_s);

  // Runs every snapshot strictly before t_s.
  void AdvanceTo(double t_s);
  // Runs every snapshot up to and including t_s.
  void Finish(double t_s);

  const TriggerState& state() const { return state_; }
  const airtrack::Tracker& tracker() const { return tracker_; }
  std::size_t frames_dropped() const { return dropped_; }

 private:
  void RunSnapshot(double t_s);

  TriggerConfig config_;
  airtrack::Tracker tracker_;
  util::CivilTime wall_origin_;
  std::int64_t wall_origin_s_;
  ActionSink sink_;
  TriggerState state_;
  long next_index_ = 0;
  std::size_t dropped_ = 0;
};

}  // namespace skylisten::trigger

#endif  // SKYLISTEN_TRIGGER_MONITOR_H_
