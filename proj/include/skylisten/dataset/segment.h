#ifndef SKYLISTEN_DATASET_SEGMENT_H_
#define SKYLISTEN_DATASET_SEGMENT_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skylisten/capture/wav.h"
#include "skylisten/dataset/record.h"

namespace skylisten::dataset {

inline constexpr double kSegmentS = 5.0;
inline constexpr std::size_t kSegmentSamples = 110250;
inline constexpr double kHourS = 3600.0;

enum class Label { kSilence = 0, kAircraft = 1, kIgnore = 2 };

std::string_view ToString(Label label);  // "0", "1", "ignore"
Label ParseLabel(std::string_view text);

struct SegmentLabel {
  std::string source;  // filename or environmental hour id
  int index = 0;
  Label label = Label::kSilence;
  double t_start_s() const { return index * kSegmentS; }
  friend bool operator==(const SegmentLabel&, const SegmentLabel&) = default;
};

struct Segment {
  SegmentLabel label;
  std::vector<double> samples;  // kSegmentSamples, scaled to [-1, 1)
  std::size_t valid_samples = 0;  // before zero padding
};

// Consecutive 5 s windows over the whole clip; the last partial window is
// zero-padded. Aircraft records are expected to be trimmed already.
std::vector<Segment> SegmentClip(const SampleRecord& record, const capture::AudioClip& clip);

// Same windowing for an unlabelled stream such as an environmental hour.
std::vector<std::vector<double>> SegmentSamples(const capture::AudioClip& clip);

struct AnnotatedEvent {
  double onset_s = 0.0;
  double offset_s = 0.0;
};

// One label per 5 s bin: 1 when the bin lies inside an event, 0 when it
// touches none, ignore when an onset or offset falls strictly inside it.
std::vector<SegmentLabel> QuantizeEnvAnnotations(std::vector<AnnotatedEvent> events,
                                                 const std::string& hour_id,
                                                 double hour_len_s = kHourS);

// hour_id,segment_index,t_start_s,label
std::string FormatEnvLabels(const std::vector<SegmentLabel>& labels);
std::vector<SegmentLabel> ParseEnvLabels(std::string_view csv);

}  // namespace skylisten::dataset

#endif  // SKYLISTEN_DATASET_SEGMENT_H_
