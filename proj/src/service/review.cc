#include "skylisten/service/review.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "httplib.h"
#include "json.hpp"
#include "skylisten/util/datetime.h"

namespace skylisten::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, const std::string& message) {
  SendJson(res, status, json{{"error", message}});
}

std::optional<capture::SidecarRow> FindRow(const std::vector<capture::SidecarRow>& rows, const std::string& name) {
  for (const auto& r : rows) {
    if (r.filename == name) return r;
  }
  return std::nullopt;
}

json TaskJson(const capture::SidecarRow& row, const std::optional<dataset::Verdict>& verdict) {
  json t = {{"filename", row.filename},
            {"class", row.event_class == trigger::EventClass::kAircraft ? 1 : 0},
            {"hex_id", row.hex.hex()},
            {"altitude_ft", row.altitude_ft ? json(*row.altitude_ft) : json(nullptr)},
            {"location_id", row.location_id},
            {"mic_id", row.mic_id},
            {"started_at", util::FormatDate(row.started_at) + " " + util::FormatClock(row.started_at)},
            {"duration_s", row.duration_s},
            {"audio_url", "/audio/" + row.filename},
            {"waveform_url", "/waveform/" + row.filename},
            {"status", std::string(dataset::ToString(verdict ? verdict->status : dataset::ReviewStatus::kPending))}};
  if (row.altitude_ft && *row.altitude_ft > dataset::kMaxAltitudeFt) t["suggested_reason"] = "over_10000ft";
  if (verdict) {
    if (verdict->trim_start_s) t["trim_start_s"] = *verdict->trim_start_s;
    if (verdict->trim_end_s) t["trim_end_s"] = *verdict->trim_end_s;
    if (verdict->reason) t["reason"] = std::string(dataset::ToString(*verdict->reason));
  }
  return t;
}

}  // namespace

std::vector<double> WaveformEnvelope(const capture::AudioClip& clip, int bins_per_second) {
  const double duration = clip.duration_s();
  const auto bins = static_cast<std::size_t>(std::ceil(duration * bins_per_second - 1e-9));
  std::vector<double> peaks(bins, 0.0);
  const double per_bin = static_cast<double>(clip.sample_rate_hz) / bins_per_second;
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const auto b = std::min(bins - 1, static_cast<std::size_t>(static_cast<double>(i) / per_bin));
    peaks[b] = std::max(peaks[b], std::abs(static_cast<double>(clip.samples[i])) / 32768.0);
  }
  return peaks;
}

ReviewService::ReviewService(fs::path recordings_dir, fs::path dataset_dir, dataset::CurateOptions options)
    : recordings_dir_(std::move(recordings_dir)),
      dataset_dir_(std::move(dataset_dir)),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  Mount(*server_);
}

ReviewService::~ReviewService() { Stop(); }

void ReviewService::Mount(httplib::Server& server) {
  const fs::path sidecar = recordings_dir_ / capture::kSidecarFile;
  const fs::path journal = recordings_dir_ / dataset::kVerdictJournal;

  server.Get("/tasks", [=, this](const httplib::Request& req, httplib::Response& res) {
    const bool all = req.get_param_value("status") == "all";
    const auto rows = fs::exists(sidecar) ? capture::LoadSidecar(sidecar) : std::vector<capture::SidecarRow>{};
    const auto verdicts = dataset::LoadVerdicts(journal);
    json tasks = json::array();
    for (const auto& row : rows) {
      const auto it = verdicts.find(row.filename);
      if (it != verdicts.end() && !all) continue;
      tasks.push_back(TaskJson(row, it == verdicts.end() ? std::nullopt : std::optional(it->second)));
    }
    SendJson(res, 200, tasks);
  });

  server.Get(R"(/audio/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    const std::string name = req.matches[1];
    const auto rows = fs::exists(sidecar) ? capture::LoadSidecar(sidecar) : std::vector<capture::SidecarRow>{};
    if (!FindRow(rows, name) || !fs::exists(recordings_dir_ / name)) return SendError(res, 404, "unknown file " + name);
    std::ifstream in(recordings_dir_ / name, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    res.set_header("Accept-Ranges", "bytes");
    res.set_content(std::move(bytes), "audio/wav");
  });

  server.Get(R"(/waveform/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    const std::string name = req.matches[1];
    const auto rows = fs::exists(sidecar) ? capture::LoadSidecar(sidecar) : std::vector<capture::SidecarRow>{};
    if (!FindRow(rows, name) || !fs::exists(recordings_dir_ / name)) return SendError(res, 404, "unknown file " + name);
    const auto clip = capture::ReadWav(recordings_dir_ / name);
    SendJson(res, 200,
             json{{"bins_per_second", kWaveformBinsPerSecond},
                  {"duration_s", clip.duration_s()},
                  {"peaks", WaveformEnvelope(clip)}});
  });

  server.Post("/verdict", [=, this](const httplib::Request& req, httplib::Response& res) {
    dataset::Verdict v;
    try {
      v = dataset::VerdictFromJson(req.body);
    } catch (const Error& e) {
      return SendError(res, 422, e.what());
    }
    std::lock_guard lock(writer_);
    const auto rows = fs::exists(sidecar) ? capture::LoadSidecar(sidecar) : std::vector<capture::SidecarRow>{};
    const auto row = FindRow(rows, v.filename);
    if (!row) return SendError(res, 404, "unknown file " + v.filename);
    try {
      dataset::ValidateVerdict(v, *row);
    } catch (const Error& e) {
      return SendError(res, 422, e.what());
    }
    dataset::AppendVerdict(journal, v);
    SendJson(res, 200, json::parse(dataset::VerdictToJson(v)));
  });

  server.Post("/commit", [=, this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(writer_);
    try {
      const auto r = dataset::BuildDataset(recordings_dir_, dataset_dir_, dataset::LoadVerdicts(journal), options_);
      SendJson(res, 200,
               json{{"records", r.records.size()},
                    {"accepted", r.accepted},
                    {"trimmed", r.trimmed},
                    {"discarded", r.discarded},
                    {"pending", r.pending},
                    {"over_altitude", r.over_altitude},
                    {"excluded_airframe", r.excluded_airframe}});
    } catch (const Error& e) {
      SendError(res, 409, e.what());
    }
  });
}

bool ReviewService::Listen(const std::string& host, int port) {
  if (Bind(host, port) < 0) return false;
  return ServeBound();
}

int ReviewService::Bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  return port_;
}

bool ReviewService::ServeBound() { return server_->listen_after_bind(); }

void ReviewService::Stop() {
  if (server_) server_->stop();
}

}  // namespace skylisten::service
