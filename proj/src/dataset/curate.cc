#include "skylisten/dataset/curate.h"

#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"
#include "skylisten/capture/wav.h"
#include "skylisten/dataset/split.h"

namespace skylisten::dataset {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Writes only when the content differs.
void WriteIfChanged(const fs::path& path, const std::string& bytes) {
  if (fs::exists(path) && ReadFile(path) == bytes) return;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw capture::CaptureError(capture::CaptureErrc::kIoFailure, "cannot write " + path.string());
}

[[noreturn]] void Bad(const std::string& msg) { throw DatasetError(DatasetErrc::kBadVerdict, msg); }

}  // namespace

std::string_view ToString(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::kPending: return "pending";
    case ReviewStatus::kAccepted: return "accepted";
    case ReviewStatus::kTrimmed: return "trimmed";
    case ReviewStatus::kDiscarded: return "discarded";
  }
  return "?";
}

std::string_view ToString(DiscardReason r) {
  switch (r) {
    case DiscardReason::kBadQuality: return "bad_quality";
    case DiscardReason::kOver10000ft: return "over_10000ft";
    case DiscardReason::kSpeechPrivacy: return "speech_privacy";
    case DiscardReason::kMislabeled: return "mislabeled";
  }
  return "?";
}

ReviewStatus ParseReviewStatus(std::string_view t) {
  for (auto s : {ReviewStatus::kPending, ReviewStatus::kAccepted, ReviewStatus::kTrimmed, ReviewStatus::kDiscarded}) {
    if (ToString(s) == t) return s;
  }
  Bad("unknown status '" + std::string(t) + "'");
}

DiscardReason ParseDiscardReason(std::string_view t) {
  for (auto r : {DiscardReason::kBadQuality, DiscardReason::kOver10000ft, DiscardReason::kSpeechPrivacy,
                 DiscardReason::kMislabeled}) {
    if (ToString(r) == t) return r;
  }
  Bad("unknown discard reason '" + std::string(t) + "'");
}

void ValidateVerdict(const Verdict& v, const capture::SidecarRow& row) {
  switch (v.status) {
    case ReviewStatus::kPending:
      Bad(v.filename + ": a verdict must accept, trim or discard");
    case ReviewStatus::kAccepted:
      return;
    case ReviewStatus::kDiscarded:
      if (!v.reason) Bad(v.filename + ": discard needs a reason");
      return;
    case ReviewStatus::kTrimmed:
      break;
  }
  if (!v.trim_start_s || !v.trim_end_s) Bad(v.filename + ": trim needs trim_start_s and trim_end_s");
  const double s = *v.trim_start_s, e = *v.trim_end_s;
  if (!std::isfinite(s) || !std::isfinite(e) || s < 0 || !(s < e) || e > row.duration_s + 1e-9) {
    Bad(v.filename + ": trim range outside the clip");
  }
  if (row.event_class == trigger::EventClass::kAircraft && e - s < 18.0 - 1e-9) {
    Bad(v.filename + ": aircraft clips keep at least 18 s");
  }
}

std::string VerdictToJson(const Verdict& v) {
  json j = {{"filename", v.filename}, {"status", std::string(ToString(v.status))}};
  if (v.trim_start_s) j["trim_start_s"] = *v.trim_start_s;
  if (v.trim_end_s) j["trim_end_s"] = *v.trim_end_s;
  if (v.reason) j["reason"] = std::string(ToString(*v.reason));
  return j.dump();
}

Verdict VerdictFromJson(std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) Bad("verdict is not a JSON object");
  auto str = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) Bad(std::string(key) + " must be a string");
    return j[key].get<std::string>();
  };
  auto num = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_number()) Bad(std::string(key) + " must be a number");
    return j[key].get<double>();
  };
  Verdict v;
  const auto filename = str("filename");
  const auto status = str("status");
  if (!filename || !status) Bad("verdict needs filename and status");
  v.filename = *filename;
  v.status = ParseReviewStatus(*status);
  v.trim_start_s = num("trim_start_s");
  v.trim_end_s = num("trim_end_s");
  if (const auto reason = str("reason")) v.reason = ParseDiscardReason(*reason);
  return v;
}

void AppendVerdict(const fs::path& journal, const Verdict& v) {
  std::ofstream out(journal, std::ios::app | std::ios::binary);
  out << VerdictToJson(v) << '\n';
  out.flush();
  if (!out) throw capture::CaptureError(capture::CaptureErrc::kIoFailure, "cannot append to " + journal.string());
}

std::map<std::string, Verdict> LoadVerdicts(const fs::path& journal) {
  std::map<std::string, Verdict> out;
  if (!fs::exists(journal)) return out;
  std::ifstream in(journal);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Verdict v = VerdictFromJson(line);
    out[v.filename] = std::move(v);
  }
  return out;
}

CurateResult BuildDataset(const fs::path& recordings_dir, const fs::path& out_dir,
                          const std::map<std::string, Verdict>& verdicts, const CurateOptions& options) {
  const auto rows = capture::LoadSidecar(recordings_dir / capture::kSidecarFile);
  CurateResult result;
  std::vector<std::pair<SampleRecord, capture::AudioClip>> kept;

  for (const auto& row : rows) {
    const auto it = verdicts.find(row.filename);
    Verdict v;
    if (it != verdicts.end()) {
      v = it->second;
      ValidateVerdict(v, row);
    } else if (options.accept_unreviewed) {
      v.filename = row.filename;
    } else {
      ++result.pending;
      continue;
    }
    if (v.status == ReviewStatus::kDiscarded) {
      ++result.discarded;
      continue;
    }
    if (row.altitude_ft && *row.altitude_ft > kMaxAltitudeFt) {
      ++result.over_altitude;
      continue;
    }

    SampleRecord r;
    r.filename = row.filename;
    r.label = row.event_class == trigger::EventClass::kAircraft ? 1 : 0;
    r.hex = row.hex;
    r.altitude_ft = row.altitude_ft;
    r.started_at = row.started_at;
    r.location_id = row.location_id;
    r.mic_id = row.mic_id;

    capture::AudioClip clip = capture::ReadWav(recordings_dir / row.filename);
    if (v.status == ReviewStatus::kTrimmed) {
      clip = capture::Trim(clip, *v.trim_start_s, *v.trim_end_s);
      ++result.trimmed;
    } else {
      ++result.accepted;
    }
    if (r.label == 1) {
      // Event bounds within the stored clip.
      r.event_start_s = 0.0;
      r.event_end_s = clip.duration_s();
    }

    if (r.label == 1 && options.registry) {
      try {
        if (options.sources.empty()) {
          const auto* entry = options.registry->Find(r.hex);
          if (entry && entry->military) throw DatasetError(DatasetErrc::kExcludedAirframe, "military airframe");
          if (entry) r.airframe = entry->meta;
        } else {
          r.airframe = ConsensusLookup(r.hex, options.sources, *options.registry);
        }
      } catch (const DatasetError& e) {
        if (e.code() == DatasetErrc::kExcludedAirframe) {
          ++result.excluded_airframe;
          continue;
        }
        // No consensus or unknown hex: the clip stays, without airframe features.
      }
    }
    ValidateRecord(r);
    kept.emplace_back(std::move(r), std::move(clip));
  }

  std::vector<SampleRecord> records;
  for (const auto& k : kept) records.push_back(k.first);
  AssignSessions(records, options.session_gap_s);
  SplitFolds(records);

  const fs::path audio = out_dir / kAudioDir;
  fs::create_directories(audio);
  std::set<std::string> wanted;
  for (const auto& [record, clip] : kept) {
    const auto bytes = capture::EncodeWav(clip);
    WriteIfChanged(audio / record.filename, std::string(bytes.begin(), bytes.end()));
    wanted.insert(record.filename);
  }
  for (const auto& entry : fs::directory_iterator(audio)) {
    if (!wanted.count(entry.path().filename().string())) fs::remove(entry.path());
  }
  WriteIfChanged(out_dir / kIndexFile, BuildIndex(records));
  result.records = std::move(records);
  return result;
}

}  // namespace skylisten::dataset
