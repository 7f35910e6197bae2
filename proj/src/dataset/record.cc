#include "skylisten/dataset/record.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "skylisten/util/csv.h"

namespace skylisten::dataset {

namespace {

std::string FormatReal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string FormatPercent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

int ToInt(const std::string& s, const std::string& column) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw DatasetError(DatasetErrc::kBadIndex, "index column " + column + ": bad integer '" + s + "'");
  }
  return v;
}

double ToReal(const std::string& s, const std::string& column) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw DatasetError(DatasetErrc::kBadIndex, "index column " + column + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void ValidateRecord(const SampleRecord& r) {
  if (r.label != 0 && r.label != 1) {
    throw DatasetError(DatasetErrc::kBadRecord, r.filename + ": class must be 0 or 1");
  }
  if (r.label == 0) return;
  if (!r.event_start_s || !r.event_end_s || !(*r.event_start_s < *r.event_end_s)) {
    throw DatasetError(DatasetErrc::kBadRecord, r.filename + ": aircraft record needs event_start_s < event_end_s");
  }
  const double length = *r.event_end_s - *r.event_start_s;
  if (length < 18.0 - 1e-9 || length > 60.0 + 1e-9) {
    throw DatasetError(DatasetErrc::kBadRecord,
                       r.filename + ": aircraft event lasts " + FormatReal(length) + " s, outside 18..60 s");
  }
}

std::vector<std::string> IndexColumns() {
  return {"filename", "class",     "fold",      "hex_id",    "date",     "time",
          "location_id", "mic_id", "session_id", "altitude_ft", "event_start_s", "event_end_s",
          "airframe", "engtype",   "engnum",    "shortdesc", "typedesig", "manu",
          "model",    "engmanu",   "engmodel",  "engfamily", "fueltype", "propmanu",
          "propmodel", "mtow_kg"};
}

std::string BuildIndex(const std::vector<SampleRecord>& records) {
  std::string out = util::JoinCsvRow(IndexColumns()) + "\n";
  for (const auto& r : records) {
    if (r.altitude_ft && *r.altitude_ft > kMaxAltitudeFt) continue;
    util::CsvRow row = {r.filename,
                        std::to_string(r.label),
                        std::to_string(r.fold),
                        r.hex.hex(),
                        util::FormatDate(r.started_at),
                        util::FormatClock(r.started_at),
                        std::to_string(r.location_id),
                        std::to_string(r.mic_id),
                        std::to_string(r.session_id),
                        r.altitude_ft ? std::to_string(*r.altitude_ft) : "",
                        r.event_start_s ? FormatReal(*r.event_start_s) : "",
                        r.event_end_s ? FormatReal(*r.event_end_s) : ""};
    if (r.airframe) {
      const auto& a = *r.airframe;
      for (const auto* s : {&a.airframe, &a.engtype}) row.push_back(*s);
      row.push_back(a.engnum ? std::to_string(*a.engnum) : "");
      for (const auto* s : {&a.shortdesc, &a.typedesig, &a.manu, &a.model, &a.engmanu, &a.engmodel,
                            &a.engfamily, &a.fueltype, &a.propmanu, &a.propmodel}) {
        row.push_back(*s);
      }
      row.push_back(a.mtow_kg ? FormatReal(*a.mtow_kg) : "");
    } else {
      row.resize(IndexColumns().size());
    }
    out += util::JoinCsvRow(row) + "\n";
  }
  return out;
}

std::vector<SampleRecord> ParseIndex(std::string_view csv) {
  const auto rows = util::ParseCsv(csv);
  const auto columns = IndexColumns();
  if (rows.empty() || rows[0] != columns) {
    throw DatasetError(DatasetErrc::kBadIndex, "index header does not match the expected columns");
  }
  std::vector<SampleRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != columns.size()) {
      throw DatasetError(DatasetErrc::kBadIndex, "index row " + std::to_string(i) + " has " +
                                                     std::to_string(f.size()) + " fields");
    }
    SampleRecord r;
    r.filename = f[0];
    r.label = ToInt(f[1], "class");
    r.fold = ToInt(f[2], "fold");
    try {
      r.hex = adsb::Icao::FromHex(f[3]);
      r.started_at = util::ParseIsoDateTime(f[4] + "T" + f[5]);
    } catch (const Error& e) {
      throw DatasetError(DatasetErrc::kBadIndex, "index row " + std::to_string(i) + ": " + e.what());
    }
    r.location_id = ToInt(f[6], "location_id");
    r.mic_id = ToInt(f[7], "mic_id");
    r.session_id = ToInt(f[8], "session_id");
    if (!f[9].empty()) r.altitude_ft = ToInt(f[9], "altitude_ft");
    if (!f[10].empty()) r.event_start_s = ToReal(f[10], "event_start_s");
    if (!f[11].empty()) r.event_end_s = ToReal(f[11], "event_end_s");
    bool any_meta = false;
    for (std::size_t k = 12; k < f.size(); ++k) any_meta |= !f[k].empty();
    if (any_meta) {
      AirframeMeta a;
      a.airframe = f[12];
      a.engtype = f[13];
      if (!f[14].empty()) a.engnum = ToInt(f[14], "engnum");
      a.shortdesc = f[15];
      a.typedesig = f[16];
      a.manu = f[17];
      a.model = f[18];
      a.engmanu = f[19];
      a.engmodel = f[20];
      a.engfamily = f[21];
      a.fueltype = f[22];
      a.propmanu = f[23];
      a.propmodel = f[24];
      if (!f[25].empty()) a.mtow_kg = ToReal(f[25], "mtow_kg");
      r.airframe = std::move(a);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SampleRecord> LoadIndex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetErrc::kBadIndex, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseIndex(buf.str());
}

std::string FormatSummary(const std::vector<SampleRecord>& records) {
  // Column 0..4 = folds 1..5, 5 = TRAIN, 6 = TEST.
  constexpr int kColumns = 7;
  std::array<int, kColumns> totals{};
  std::map<std::pair<std::string, int>, std::array<int, kColumns>> counts;
  auto bump = [&](const std::string& group, int key, int column) {
    counts[{group, key}][column] += 1;
  };
  std::set<int> locations, mics;
  for (const auto& r : records) {
    if (r.fold < 1 || r.fold > kFolds) continue;
    const int column = r.fold == kTestFold ? 6 : r.fold - 1;
    std::vector<int> columns = {column};
    if (r.fold != kTestFold) columns.push_back(5);
    for (int c : columns) {
      ++totals[c];
      bump("class", r.label, c);
      bump("location", r.location_id, c);
      bump("microphone", r.mic_id, c);
    }
    locations.insert(r.location_id);
    mics.insert(r.mic_id);
  }
  std::string out = "group,key,1,2,3,4,5,TRAIN,TEST\n";
  auto emit = [&](const std::string& group, int key) {
    util::CsvRow row = {group, std::to_string(key)};
    const auto it = counts.find({group, key});
    for (int c = 0; c < kColumns; ++c) {
      const int n = it == counts.end() ? 0 : it->second[c];
      row.push_back(FormatPercent(totals[c] ? 100.0 * n / totals[c] : 0.0));
    }
    out += util::JoinCsvRow(row) + "\n";
  };
  emit("class", 0);
  emit("class", 1);
  for (int l : locations) emit("location", l);
  for (int m : mics) emit("microphone", m);
  return out;
}

}  // namespace skylisten::dataset
