#include "skylisten/eval/pipeline.h"

#include <map>

#include "skylisten/dataset/segment.h"

namespace skylisten::eval {

std::vector<features::FeatureMatrix> ClipFeatures(const std::string& filename, const capture::AudioClip& clip) {
  std::vector<features::FeatureMatrix> out;
  const auto segments = dataset::SegmentSamples(clip);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    out.push_back(features::Mfcc(segments[i], filename + "#" + std::to_string(i)));
  }
  return out;
}

std::vector<features::FeatureMatrix> DatasetFeatures(const std::vector<dataset::SampleRecord>& records,
                                                     const std::filesystem::path& audio_dir) {
  std::vector<features::FeatureMatrix> out;
  for (const auto& r : records) {
    auto clip = ClipFeatures(r.filename, capture::ReadWav(audio_dir / r.filename));
    for (auto& m : clip) out.push_back(std::move(m));
  }
  return out;
}

std::vector<models::FeatureSet> GroupByFold(const std::vector<dataset::SampleRecord>& records,
                                            const std::vector<features::FeatureMatrix>& matrices) {
  std::map<std::string, const dataset::SampleRecord*> by_name;
  for (const auto& r : records) by_name[r.filename] = &r;
  std::vector<models::FeatureSet> folds(dataset::kFolds);
  for (const auto& m : matrices) {
    const auto it = by_name.find(m.source.substr(0, m.source.rfind('#')));
    if (it == by_name.end()) throw EvalError(EvalErrc::kBadInput, m.source + " has no record in the index");
    const int fold = it->second->fold;
    if (fold < 1 || fold > dataset::kFolds) throw EvalError(EvalErrc::kBadInput, m.source + " has no fold");
    folds[fold - 1].Add(m, it->second->label);
  }
  return folds;
}

EnvHour LoadEnvHour(const std::string& id, const capture::AudioClip& audio,
                    const std::vector<dataset::SegmentLabel>& labels) {
  EnvHour hour;
  hour.id = id;
  const auto matrices = ClipFeatures(id, audio);
  if (matrices.size() != labels.size()) {
    throw EvalError(EvalErrc::kLengthMismatch, id + ": " + std::to_string(matrices.size()) + " segments but " +
                                                   std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    hour.labels.push_back(labels[i].label);
    hour.segments.Add(matrices[i], labels[i].label == dataset::Label::kAircraft ? 1 : 0);
  }
  return hour;
}

}  // namespace skylisten::eval
