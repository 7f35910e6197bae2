#include "skylisten/capture/recorder.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "skylisten/util/csv.h"

namespace skylisten::capture {

namespace {

const util::CsvRow kSidecarColumns = {"filename",    "class",  "hex_id",     "altitude_ft",
                                      "location_id", "mic_id", "started_at", "duration_s"};

int ParseInt(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(std::string("recordings.csv: bad ") + what + " '" + s + "'");
}

}  // namespace

std::string SidecarHeader() { return util::JoinCsvRow(kSidecarColumns); }

std::string FormatSidecarRow(const SidecarRow& row) {
  char duration[32];
  std::snprintf(duration, sizeof duration, "%g", row.duration_s);
  return util::JoinCsvRow({row.filename,
                           row.event_class == trigger::EventClass::kAircraft ? "1" : "0",
                           row.hex.hex(),
                           row.altitude_ft ? std::to_string(*row.altitude_ft) : "",
                           std::to_string(row.location_id),
                           std::to_string(row.mic_id),
                           util::FormatIsoDateTime(row.started_at),
                           duration});
}

std::vector<SidecarRow> ParseSidecar(std::string_view text) {
  const auto rows = util::ParseCsv(text);
  if (rows.empty() || rows[0] != kSidecarColumns) {
    throw Error("recordings.csv: unexpected header");
  }
  std::vector<SidecarRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != kSidecarColumns.size()) {
      throw Error("recordings.csv: row " + std::to_string(i) + " has " +
                  std::to_string(r.size()) + " fields");
    }
    SidecarRow row;
    row.filename = r[0];
    if (r[1] != "0" && r[1] != "1") throw Error("recordings.csv: bad class '" + r[1] + "'");
    row.event_class = r[1] == "1" ? trigger::EventClass::kAircraft : trigger::EventClass::kSilence;
    row.hex = adsb::Icao::FromHex(r[2]);
    if (!r[3].empty()) row.altitude_ft = ParseInt(r[3], "altitude_ft");
    row.location_id = ParseInt(r[4], "location_id");
    row.mic_id = ParseInt(r[5], "mic_id");
    row.started_at = util::ParseIsoDateTime(r[6]);
    row.duration_s = std::stod(r[7]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<SidecarRow> LoadSidecar(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaptureError(CaptureErrc::kIoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseSidecar(buf.str());
}

void AppendSidecar(const std::filesystem::path& path, const SidecarRow& row) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (fresh) out << SidecarHeader() << '\n';
  out << FormatSidecarRow(row) << '\n';
  if (!out) throw CaptureError(CaptureErrc::kIoFailure, "cannot append to " + path.string());
}

AudioClip PullClip(AudioSource& source, double duration_s) {
  const auto total = static_cast<std::size_t>(std::llround(duration_s * kSampleRateHz));
  AudioClip clip;
  clip.samples.resize(total);
  std::size_t filled = 0;
  while (filled < total) {
    const std::size_t want = std::min(kPullBlock, total - filled);
    const std::size_t got = source.Pull(std::span(clip.samples).subspan(filled, want));
    filled += got;
    if (got < want) {
      throw CaptureError(CaptureErrc::kSourceUnderrun,
                         "audio source ended after " + std::to_string(filled) + " of " +
                             std::to_string(total) + " samples");
    }
  }
  return clip;
}

namespace {

SidecarRow Commit(const AudioClip& clip, const trigger::RecordingEvent& event,
                  const std::filesystem::path& out_dir) {
  SidecarRow row;
  row.filename = trigger::MakeFilename(event);
  row.event_class = event.event_class;
  row.hex = event.hex;
  row.altitude_ft = event.altitude_ft;
  row.location_id = event.location_id;
  row.mic_id = event.mic_id;
  row.started_at = event.started_at;
  row.duration_s = clip.duration_s();
  WriteWav(out_dir / row.filename, clip);
  AppendSidecar(out_dir / kSidecarFile, row);
  return row;
}

}  // namespace

SidecarRow Record(AudioSource& source, double duration_s, const trigger::RecordingEvent& event,
                  const std::filesystem::path& out_dir) {
  return Commit(PullClip(source, duration_s), event, out_dir);
}

Recorder::Recorder(std::filesystem::path out_dir, SourceFor source_for)
    : out_dir_(std::move(out_dir)), source_for_(std::move(source_for)) {}

void Recorder::Handle(const trigger::Action& action) {
  switch (action.kind) {
    case trigger::ActionKind::kStartAircraftRecording:
    case trigger::ActionKind::kStartSilenceRecording:
      pending_event_ = action.event;
      pending_clip_.reset();
      try {
        pending_clip_ = PullClip(source_for_(action.event), action.event.duration_s);
      } catch (const CaptureError& e) {
        if (e.code() != CaptureErrc::kSourceUnderrun) throw;
        ++underruns_;
      }
      break;
    case trigger::ActionKind::kStopRecording:
      if (pending_event_ && pending_clip_) {
        written_.push_back(Commit(*pending_clip_, *pending_event_, out_dir_));
      }
      pending_event_.reset();
      pending_clip_.reset();
      break;
    case trigger::ActionKind::kAbortSilenceRecording:
      ++aborted_;
      pending_event_.reset();
      pending_clip_.reset();
      break;
  }
}

}  // namespace skylisten::capture
