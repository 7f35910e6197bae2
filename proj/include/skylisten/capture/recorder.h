#ifndef SKYLISTEN_CAPTURE_RECORDER_H_
#define SKYLISTEN_CAPTURE_RECORDER_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skylisten/capture/source.h"
#include "skylisten/capture/wav.h"
#include "skylisten/trigger/trigger.h"

namespace skylisten::capture {

inline constexpr std::size_t kPullBlock = 4096;
inline constexpr std::string_view kSidecarFile = "recordings.csv";

// One row of recordings.csv, written next to the WAV files.
struct SidecarRow {
  std::string filename;
  trigger::EventClass event_class = trigger::EventClass::kSilence;
  adsb::Icao hex;
  std::optional<int> altitude_ft;
  int location_id = 0;
  int mic_id = 0;
  util::CivilTime started_at;
  double duration_s = 0.0;
  friend bool operator==(const SidecarRow&, const SidecarRow&) = default;
};

// filename,class,hex_id,altitude_ft,location_id,mic_id,started_at,duration_s
std::string SidecarHeader();
std::string FormatSidecarRow(const SidecarRow& row);
std::vector<SidecarRow> ParseSidecar(std::string_view text);
std::vector<SidecarRow> LoadSidecar(const std::filesystem::path& path);
// Creates the file with its header on first use.
void AppendSidecar(const std::filesystem::path& path, const SidecarRow& row);

// Pulls exactly duration_s * 22050 samples in kPullBlock blocks. Throws
// kSourceUnderrun if the source ends first.
AudioClip PullClip(AudioSource& source, double duration_s);

// Captures one event: WAV named by MakeFilename in out_dir plus its sidecar
// row. On underrun nothing is written.
SidecarRow Record(AudioSource& source, double duration_s,
                  const trigger::RecordingEvent& event,
                  const std::filesystem::path& out_dir);

// Consumes trigger actions in order. The clip for an event is captured when
// it starts and committed to disk on stop, so an aborted silence recording
// never reaches the output directory.
class Recorder {
 public:
  using SourceFor = std::function<AudioSource&(const trigger::RecordingEvent&)>;

  Recorder(std::filesystem::path out_dir, SourceFor source_for);

  void Handle(const trigger::Action& action);

  const std::vector<SidecarRow>& written() const { return written_; }
  std::size_t aborted() const { return aborted_; }
  std::size_t underruns() const { return underruns_; }

 private:
  std::filesystem::path out_dir_;
  SourceFor source_for_;
  std::optional<trigger::RecordingEvent> pending_event_;
  std::optional<AudioClip> pending_clip_;
  std::vector<SidecarRow> written_;
  std::size_t aborted_ = 0;
  std::size_t underruns_ = 0;
};

}  // namespace skylisten::capture

#endif  // SKYLISTEN_CAPTURE_RECORDER_H_
