#ifndef SKYLISTEN_DATASET_CURATE_H_
#define SKYLISTEN_DATASET_CURATE_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skylisten/capture/recorder.h"
#include "skylisten/dataset/record.h"
#include "skylisten/dataset/registry.h"

namespace skylisten::dataset {

inline constexpr std::string_view kVerdictJournal = "verdicts.jsonl";
inline constexpr std::string_view kIndexFile = "index.csv";
inline constexpr std::string_view kAudioDir = "audio";

enum class ReviewStatus { kPending, kAccepted, kTrimmed, kDiscarded };
enum class DiscardReason { kBadQuality, kOver10000ft, kSpeechPrivacy, kMislabeled };

std::string_view ToString(ReviewStatus s);   // pending, accepted, trimmed, discarded
std::string_view ToString(DiscardReason r);  // bad_quality, over_10000ft, speech_privacy, mislabeled
ReviewStatus ParseReviewStatus(std::string_view text);
DiscardReason ParseDiscardReason(std::string_view text);

struct Verdict {
  std::string filename;
  ReviewStatus status = ReviewStatus::kAccepted;
  std::optional<double> trim_start_s;
  std::optional<double> trim_end_s;
  std::optional<DiscardReason> reason;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

// Throws kBadVerdict: status must be accepted, trimmed or discarded; a trim
// needs 0 <= start < end <= clip length and, for aircraft clips, keeps at
// least 18 s; a discard needs a reason.
void ValidateVerdict(const Verdict& v, const capture::SidecarRow& row);

// One JSON object per line; throws kBadVerdict on malformed JSON.
std::string VerdictToJson(const Verdict& v);
Verdict VerdictFromJson(std::string_view json);
void AppendVerdict(const std::filesystem::path& journal, const Verdict& v);
// Last verdict per filename wins. A missing journal is empty.
std::map<std::string, Verdict> LoadVerdicts(const std::filesystem::path& journal);

struct CurateOptions {
  // With no verdict a recording is pending and stays out of the dataset,
  // unless this is set.
  bool accept_unreviewed = false;
  const AirframeRegistry* registry = nullptr;
  std::vector<const RegistrationSource*> sources;  // consensus when non-empty
  double session_gap_s = 7200.0;
};

struct CurateResult {
  std::vector<SampleRecord> records;  // as written to the index
  std::size_t accepted = 0;
  std::size_t trimmed = 0;
  std::size_t discarded = 0;
  std::size_t pending = 0;
  std::size_t over_altitude = 0;
  std::size_t excluded_airframe = 0;
};

// Rebuilds out_dir from the untouched recordings: audio/ holds the kept
// (and trimmed) clips, index.csv the fold-assigned records. Files already
// holding the right bytes are left alone and stale ones removed, so running
// it twice changes nothing.
CurateResult BuildDataset(const std::filesystem::path& recordings_dir, const std::filesystem::path& out_dir,
                          const std::map<std::string, Verdict>& verdicts, const CurateOptions& options = {});

}  // namespace skylisten::dataset

#endif  // SKYLISTEN_DATASET_CURATE_H_
