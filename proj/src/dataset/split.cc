#include "skylisten/dataset/split.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <tuple>

namespace skylisten::dataset {

void AssignSessions(std::vector<SampleRecord>& records, double gap_s) {
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    const auto& r = records[i];
    return std::make_tuple(r.location_id, r.mic_id, util::ToEpochSeconds(r.started_at), i);
  };
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return key(a) < key(b); });

  // Provisional ids in (location, mic, time) order, renumbered by start.
  std::vector<int> provisional(records.size());
  std::vector<std::tuple<std::int64_t, int, int, int>> starts;  // t, loc, mic, id
  int next = -1;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& r = records[order[k]];
    const std::int64_t t = util::ToEpochSeconds(r.started_at);
    bool fresh = k == 0;
    if (!fresh) {
      const auto& p = records[order[k - 1]];
      fresh = p.location_id != r.location_id || p.mic_id != r.mic_id ||
              static_cast<double>(t - util::ToEpochSeconds(p.started_at)) >= gap_s;
    }
    if (fresh) starts.emplace_back(t, r.location_id, r.mic_id, ++next);
    provisional[order[k]] = next;
  }
  std::sort(starts.begin(), starts.end());
  std::vector<int> renumber(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) renumber[std::get<3>(starts[i])] = static_cast<int>(i);
  for (std::size_t i = 0; i < records.size(); ++i) records[i].session_id = renumber[provisional[i]];
}

void SplitFolds(std::vector<SampleRecord>& records) {
  if (records.empty()) return;
  struct Session {
    int id;
    std::int64_t start;
    int clips = 0;
  };
  std::map<int, Session> by_id;
  for (const auto& r : records) {
    if (r.session_id < 0) throw DatasetError(DatasetErrc::kBadRecord, r.filename + ": no session assigned");
    const std::int64_t t = util::ToEpochSeconds(r.started_at);
    auto [it, inserted] = by_id.try_emplace(r.session_id, Session{r.session_id, t, 0});
    it->second.start = std::min(it->second.start, t);
    ++it->second.clips;
  }
  std::vector<Session> sessions;
  for (auto& [id, s] : by_id) sessions.push_back(s);
  std::sort(sessions.begin(), sessions.end(),
            [](const Session& a, const Session& b) { return std::tie(a.start, a.id) < std::tie(b.start, b.id); });

  const double target = static_cast<double>(records.size()) / kFolds;
  std::map<int, int> fold_of;

  // Test fold: walk back from the latest session and stop at whichever side
  // of the target is closer.
  int test_clips = 0;
  std::size_t first_test = sessions.size();
  while (first_test > 0) {
    const int with = test_clips + sessions[first_test - 1].clips;
    if (test_clips > 0 && std::abs(with - target) > std::abs(test_clips - target)) break;
    test_clips = with;
    --first_test;
    if (test_clips >= target) break;
  }
  for (std::size_t i = first_test; i < sessions.size(); ++i) fold_of[sessions[i].id] = kTestFold;

  std::vector<Session> train(sessions.begin(), sessions.begin() + static_cast<std::ptrdiff_t>(first_test));
  std::stable_sort(train.begin(), train.end(), [](const Session& a, const Session& b) { return a.clips > b.clips; });
  std::array<int, kFolds> load{};
  load[kTestFold - 1] = test_clips;
  for (const auto& s : train) {
    int lightest = 0;
    for (int f = 1; f < kFolds - 1; ++f) {
      if (load[f] < load[lightest]) lightest = f;
    }
    load[lightest] += s.clips;
    fold_of[s.id] = lightest + 1;
  }

  for (int f = 0; f < kFolds; ++f) {
    if (std::abs(load[f] - target) > kFoldTolerance * target) {
      char msg[200];
      std::snprintf(msg, sizeof msg,
                    "fold %d would hold %d clips; every fold must be within %.0f%% of %.1f",
                    f + 1, load[f], 100 * kFoldTolerance, target);
      throw DatasetError(DatasetErrc::kInfeasibleSplit, msg);
    }
  }
  for (auto& r : records) r.fold = fold_of.at(r.session_id);
}

}  // namespace skylisten::dataset
