#include "skylisten/trigger/monitor.h"

#include <cmath>

namespace skylisten::trigger {

MonitorLoop::MonitorLoop(TriggerConfig config,
                         airtrack::TrackerConfig tracker_config,
                         util::CivilTime wall_origin, ActionSink sink)
    : config_(std::move(config)),
      tracker_(std::move(tracker_config)),
      wall_origin_(wall_origin),
      wall_origin_s_(util::ToEpochSeconds(wall_origin)),
      sink_(std::move(sink)) {
  config_.Validate();
}

void MonitorLoop::OnFrame(const adsb::ModeSFrame& frame, double t_s) {
  AdvanceTo(t_s);
  if (tracker_.Ingest(frame, t_s).dropped) ++dropped_;
}

void MonitorLoop::OnSbs(const adsb::SbsMessage& msg, double t_s) {
  AdvanceTo(t_s);
  tracker_.Ingest(msg, t_s);
}

void MonitorLoop::AdvanceTo(double t_s) {
  while (next_index_ * config_.snapshot_period_s < t_s) {
    RunSnapshot(next_index_ * config_.snapshot_period_s);
    ++next_index_;
  }
}

void MonitorLoop::Finish(double t_s) {
  while (next_index_ * config_.snapshot_period_s <= t_s) {
    RunSnapshot(next_index_ * config_.snapshot_period_s);
    ++next_index_;
  }
}

void MonitorLoop::RunSnapshot(double t_s) {
  const auto snapshot = tracker_.Snapshot(t_s);
  const auto wall = util::FromEpochSeconds(
      wall_origin_s_ + static_cast<std::int64_t>(std::floor(t_s)));
  StepResult result = Step(state_, snapshot, config_, t_s, wall);
  state_ = std::move(result.state);
  for (const Action& a : result.actions) sink_(a);
}

}  // namespace skylisten::trigger
