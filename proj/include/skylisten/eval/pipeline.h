#ifndef SKYLISTEN_EVAL_PIPELINE_H_
#define SKYLISTEN_EVAL_PIPELINE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "skylisten/capture/wav.h"
#include "skylisten/dataset/record.h"
#include "skylisten/eval/protocol.h"
#include "skylisten/features/mfcc.h"

namespace skylisten::eval {

// One 13 x 216 matrix per 5 s segment, named "<filename>#<segment>".
std::vector<features::FeatureMatrix> ClipFeatures(const std::string& filename, const capture::AudioClip& clip);

// Every record's clip from audio_dir, in index order.
std::vector<features::FeatureMatrix> DatasetFeatures(const std::vector<dataset::SampleRecord>& records,
                                                     const std::filesystem::path& audio_dir);

// Six sets, element k holding fold k + 1. Segment labels come from the
// record named before the '#'. Throws kBadInput for a matrix whose record is
// not in the index.
std::vector<models::FeatureSet> GroupByFold(const std::vector<dataset::SampleRecord>& records,
                                            const std::vector<features::FeatureMatrix>& matrices);

// An hour of audio with its quantized labels; the bin counts must agree.
EnvHour LoadEnvHour(const std::string& id, const capture::AudioClip& audio,
                    const std::vector<dataset::SegmentLabel>& labels);

}  // namespace skylisten::eval

#endif  // SKYLISTEN_EVAL_PIPELINE_H_
