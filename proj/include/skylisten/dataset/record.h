#ifndef SKYLISTEN_DATASET_RECORD_H_
#define SKYLISTEN_DATASET_RECORD_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skylisten/adsb/modes.h"
#include "skylisten/error.h"
#include "skylisten/util/datetime.h"

namespace skylisten::dataset {

enum class DatasetErrc {
  kInfeasibleSplit,
  kOverlappingEvents,
  kNoConsensus,
  kUnknownHex,
  kExcludedAirframe,
  kBadIndex,
  kBadRecord,
  kBadVerdict,
  kUnknownFile,
};
using DatasetError = CodedError<DatasetErrc>;

inline constexpr int kFolds = 6;
inline constexpr int kTestFold = 6;
inline constexpr int kMaxAltitudeFt = 10000;

struct AirframeMeta {
  std::string registration;
  std::string airframe;
  std::string engtype;
  std::optional<int> engnum;
  std::string shortdesc;
  std::string typedesig;
  std::string manu;
  std::string model;
  std::string engmanu;
  std::string engmodel;
  std::string engfamily;
  std::string fueltype;
  std::string propmanu;
  std::string propmodel;
  std::optional<double> mtow_kg;
  friend bool operator==(const AirframeMeta&, const AirframeMeta&) = default;
};

struct SampleRecord {
  std::string filename;
  int label = 0;  // 1 = aircraft, 0 = silence
  adsb::Icao hex;
  std::optional<int> altitude_ft;
  util::CivilTime started_at;
  int location_id = 0;
  int mic_id = 0;
  int session_id = -1;
  int fold = 0;
  std::optional<double> event_start_s;
  std::optional<double> event_end_s;
  std::optional<AirframeMeta> airframe;
  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

// Throws kBadRecord when an aircraft record lacks a valid event range or a
// trimmed event falls outside 18..60 s.
void ValidateRecord(const SampleRecord& record);

std::vector<std::string> IndexColumns();

// One row per record in IndexColumns() order. Records above kMaxAltitudeFt
// are left out. The registration is a lookup key only and is not stored.
std::string BuildIndex(const std::vector<SampleRecord>& records);
std::vector<SampleRecord> ParseIndex(std::string_view csv);
std::vector<SampleRecord> LoadIndex(const std::filesystem::path& path);

// Class / location / microphone percentages per fold, training total and
// test total, by clip count. Rows are "class,0", "class,1", "location,N",
// "microphone,N"; columns 1..5, TRAIN, TEST.
std::string FormatSummary(const std::vector<SampleRecord>& records);

}  // namespace skylisten::dataset

#endif  // SKYLISTEN_DATASET_RECORD_H_
