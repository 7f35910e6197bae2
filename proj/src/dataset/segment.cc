#include "skylisten/dataset/segment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "skylisten/util/csv.h"

namespace skylisten::dataset {

std::string_view ToString(Label label) {
  switch (label) {
    case Label::kSilence: return "0";
    case Label::kAircraft: return "1";
    case Label::kIgnore: return "ignore";
  }
  return "?";
}

Label ParseLabel(std::string_view text) {
  if (text == "0") return Label::kSilence;
  if (text == "1") return Label::kAircraft;
  if (text == "ignore") return Label::kIgnore;
  throw DatasetError(DatasetErrc::kBadIndex, "bad label '" + std::string(text) + "'");
}

std::vector<std::vector<double>> SegmentSamples(const capture::AudioClip& clip) {
  std::vector<std::vector<double>> out;
  const auto& s = clip.samples;
  for (std::size_t first = 0; first < s.size(); first += kSegmentSamples) {
    std::vector<double> window(kSegmentSamples, 0.0);
    const std::size_t n = std::min(kSegmentSamples, s.size() - first);
    for (std::size_t i = 0; i < n; ++i) window[i] = s[first + i] / 32768.0;
    out.push_back(std::move(window));
  }
  return out;
}

std::vector<Segment> SegmentClip(const SampleRecord& record, const capture::AudioClip& clip) {
  auto windows = SegmentSamples(clip);
  std::vector<Segment> out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    Segment seg;
    seg.label = {record.filename, static_cast<int>(i),
                 record.label == 1 ? Label::kAircraft : Label::kSilence};
    seg.valid_samples = std::min(kSegmentSamples, clip.samples.size() - i * kSegmentSamples);
    seg.samples = std::move(windows[i]);
    out.push_back(std::move(seg));
  }
  return out;
}

std::vector<SegmentLabel> QuantizeEnvAnnotations(std::vector<AnnotatedEvent> events,
                                                 const std::string& hour_id, double hour_len_s) {
  std::sort(events.begin(), events.end(),
            [](const AnnotatedEvent& a, const AnnotatedEvent& b) { return a.onset_s < b.onset_s; });
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const bool bad = !(e.onset_s >= 0.0 && e.onset_s < e.offset_s && e.offset_s <= hour_len_s);
    if (bad || (i > 0 && e.onset_s < events[i - 1].offset_s)) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "%s: event [%g, %g] is empty, outside the hour or overlaps another",
                    hour_id.c_str(), e.onset_s, e.offset_s);
      throw DatasetError(DatasetErrc::kOverlappingEvents, msg);
    }
  }
  const int bins = static_cast<int>(std::llround(hour_len_s / kSegmentS));
  std::vector<SegmentLabel> out;
  out.reserve(bins);
  for (int b = 0; b < bins; ++b) {
    const double lo = b * kSegmentS;
    const double hi = lo + kSegmentS;
    Label label = Label::kSilence;
    for (const auto& e : events) {
      if (hi <= e.onset_s || lo >= e.offset_s) continue;
      label = (e.onset_s <= lo && hi <= e.offset_s) ? Label::kAircraft : Label::kIgnore;
      break;
    }
    out.push_back({hour_id, b, label});
  }
  return out;
}

std::string FormatEnvLabels(const std::vector<SegmentLabel>& labels) {
  std::string out = "hour_id,segment_index,t_start_s,label\n";
  char t[32];
  for (const auto& l : labels) {
    std::snprintf(t, sizeof t, "%g", l.t_start_s());
    out += util::JoinCsvRow({l.source, std::to_string(l.index), t, std::string(ToString(l.label))}) + "\n";
  }
  return out;
}

std::vector<SegmentLabel> ParseEnvLabels(std::string_view csv) {
  const auto rows = util::ParseCsv(csv);
  const util::CsvRow header = {"hour_id", "segment_index", "t_start_s", "label"};
  if (rows.empty() || rows[0] != header) {
    throw DatasetError(DatasetErrc::kBadIndex, "environment label header mismatch");
  }
  std::vector<SegmentLabel> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 4) throw DatasetError(DatasetErrc::kBadIndex, "environment label row " + std::to_string(i));
    SegmentLabel l;
    l.source = r[0];
    try {
      l.index = std::stoi(r[1]);
    } catch (const std::exception&) {
      throw DatasetError(DatasetErrc::kBadIndex, "bad segment_index '" + r[1] + "'");
    }
    l.label = ParseLabel(r[3]);
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace skylisten::dataset
