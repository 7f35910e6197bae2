#ifndef SKYLISTEN_DATASET_SPLIT_H_
#define SKYLISTEN_DATASET_SPLIT_H_

#include <vector>

#include "skylisten/dataset/record.h"

namespace skylisten::dataset {

inline constexpr double kSessionGapS = 2 * 3600.0;
inline constexpr double kFoldTolerance = 0.15;

// Records at the same location and microphone whose start times are less
// than kSessionGapS apart share a session. Sessions are numbered from 0 in
// order of their first recording.
void AssignSessions(std::vector<SampleRecord>& records, double gap_s = kSessionGapS);

// Whole sessions to folds 1..6. Fold 6 takes the latest sessions, so within
// every location the test sessions start after all training sessions. The
// rest go largest-first to the lightest of folds 1..5. Every fold must hold
// within kFoldTolerance of total/6 clips, else kInfeasibleSplit.
void SplitFolds(std::vector<SampleRecord>& records);

}  // namespace skylisten::dataset

#endif  // SKYLISTEN_DATASET_SPLIT_H_
