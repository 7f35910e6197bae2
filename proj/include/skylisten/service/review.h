#ifndef SKYLISTEN_SERVICE_REVIEW_H_
#define SKYLISTEN_SERVICE_REVIEW_H_

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

#include "skylisten/dataset/curate.h"

namespace httplib {
class Server;
}

namespace skylisten::service {

inline constexpr int kWaveformBinsPerSecond = 100;

// Peak |sample| / 32768 per bin, ceil(duration * bins_per_second) bins.
std::vector<double> WaveformEnvelope(const capture::AudioClip& clip, int bins_per_second = kWaveformBinsPerSecond);

// Review API over a recordings directory (WAV files plus recordings.csv).
// Verdicts go to verdicts.jsonl in that directory; commits rebuild
// dataset_dir.
//
//   GET  /tasks                pending tasks; ?status=all lists every task
//   GET  /audio/{filename}     WAV bytes, Range requests honoured
//   GET  /waveform/{filename}  {bins_per_second, duration_s, peaks}
//   POST /verdict              {filename, status, trim_start_s?, trim_end_s?, reason?}
//   POST /commit               applies verdicts, returns counts
//
// 404 for files not in the sidecar, 422 for verdicts that fail
// validation, 409 when the commit itself fails.
class ReviewService {
 public:
  ReviewService(std::filesystem::path recordings_dir, std::filesystem::path dataset_dir,
                dataset::CurateOptions options = {});
  ~ReviewService();

  void Mount(httplib::Server& server);
  // Blocks until Stop(). Port 0 picks a free port; see port().
  bool Listen(const std::string& host, int port);
  // Binds without serving; returns the port or -1.
  int Bind(const std::string& host, int port);
  bool ServeBound();
  void Stop();
  int port() const { return port_; }

 private:
  std::filesystem::path recordings_dir_;
  std::filesystem::path dataset_dir_;
  dataset::CurateOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex writer_;  // verdict appends and commits
  int port_ = -1;
};

}  // namespace skylisten::service

#endif  // SKYLISTEN_SERVICE_REVIEW_H_
