#include "cli.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "skylisten/adsb/modes.h"
#include "skylisten/adsb/stream.h"
#include "skylisten/airtrack/tracker.h"
#include "skylisten/capture/recorder.h"
#include "skylisten/capture/source.h"
#include "skylisten/dataset/curate.h"
#include "skylisten/dataset/segment.h"
#include "skylisten/eval/pipeline.h"
#include "skylisten/eval/protocol.h"
#include "skylisten/service/review.h"
#include "skylisten/simulate/scenario.h"
#include "skylisten/trigger/config.h"
#include "skylisten/trigger/monitor.h"
#include "skylisten/util/csv.h"
#include "skylisten/util/datetime.h"

namespace skylisten::cli {

namespace fs = std::filesystem;

namespace {

// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string Real(double v, const char* fmt = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string ReadAll(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string ReadPath(const std::string& path, std::istream& in) {
  if (path == "-") return ReadAll(in);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  return ReadAll(f);
}

void WritePath(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw Error("cannot write " + path);
}

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t Fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario;
  double approach_km = -1;
  std::string config;
  int location = 0;
  double speed_kt = 140.0;
  int altitude_ft = 1000;
  double start_s = 0.0;
  double rate_hz = 2.0;
  std::uint64_t seed = 1;
  std::string format = "avr";
  std::string out = "-";
};

int Simulate(const SimulateArgs& a, std::istream& in, std::ostream& out) {
  simulate::Scenario sc;
  if (!a.scenario.empty()) {
    sc = simulate::ParseScenario(ReadPath(a.scenario, in));
  } else {
    if (a.approach_km < 0) throw UsageError("simulate needs --scenario or --approach");
    trigger::TriggerConfig cfg;
    cfg.location_id = a.location;
    cfg.trigger_distance_km = trigger::StandardTriggerDistanceKm(a.location);
    if (!a.config.empty()) cfg = trigger::FindLocation(trigger::LoadTriggerConfig(a.config), a.location);
    simulate::ApproachOptions opt;
    opt.speed_kt = a.speed_kt;
    opt.altitude_ft = a.altitude_ft;
    opt.start_s = a.start_s;
    opt.message_rate_hz = a.rate_hz;
    opt.seed = a.seed;
    sc = simulate::ScriptedApproach(cfg, a.approach_km, opt);
  }
  std::string text;
  if (a.format == "avr") {
    text = simulate::FormatAvrStream(simulate::Emit(sc));
  } else if (a.format == "sbs") {
    text = simulate::EmitSbsStream(sc);
  } else {
    text = simulate::FormatScenario(sc);
  }
  WritePath(a.out, text, out);
  return kExitOk;
}

// ---------------------------------------------------------------- decode

struct DecodeArgs {
  std::string in = "-";
  std::string out = "-";
  std::vector<double> receiver;
};

std::string Opt(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

int Decode(const DecodeArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  airtrack::TrackerConfig tc;
  if (a.receiver.size() == 2) tc.receiver = LatLon{a.receiver[0], a.receiver[1]};
  airtrack::Tracker tracker(tc);
  std::string csv =
      "t_s,df,icao,type_code,crc_ok,kind,cpr_format,altitude_ft,ground_speed_kt,heading_deg,"
      "vertical_rate_fpm,callsign,lat,lon\n";
  std::istringstream lines(ReadPath(a.in, in));
  std::string line;
  std::size_t skipped = 0, n = 0;
  while (std::getline(lines, line)) {
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    adsb::ModeSFrame f;
    double t = static_cast<double>(n);
    try {
      if (line[0] == '*') {
        f = adsb::ParseFrame(adsb::ParseAvrLine(line, t));
      } else {
        const auto timed = adsb::ParseTimedAvrLine(line);
        t = timed.t_s;
        f = adsb::ParseFrame(timed.frame);
      }
    } catch (const Error&) {
      ++skipped;
      continue;
    }
    ++n;
    const auto report = tracker.Ingest(f, t);
    util::CsvRow row = {Real(t, "%.3f"), std::to_string(f.df), f.icao.hex(), std::to_string(f.type_code),
                        f.crc_ok ? "1" : "0"};
    std::string kind = "other", cpr, alt, gs, hdg, vr, cs;
    if (const auto* p = std::get_if<adsb::AirbornePositionMsg>(&f.payload)) {
      kind = "position";
      cpr = p->cpr_format == adsb::CprFormat::kEven ? "even" : "odd";
      alt = Opt(p->altitude_ft);
    } else if (const auto* v = std::get_if<adsb::VelocityMsg>(&f.payload)) {
      kind = "velocity";
      gs = Real(v->ground_speed_kt, "%.1f");
      hdg = Real(v->heading_deg, "%.1f");
      vr = std::to_string(v->vertical_rate_fpm);
    } else if (const auto* id = std::get_if<adsb::IdentificationMsg>(&f.payload)) {
      kind = "identification";
      cs = id->callsign;
    }
    std::string lat, lon;
    if (report.position_updated) {
      const auto* s = tracker.Find(f.icao);
      lat = Real(s->position->lat_deg);
      lon = Real(s->position->lon_deg);
    }
    for (auto* field : {&kind, &cpr, &alt, &gs, &hdg, &vr, &cs, &lat, &lon}) row.push_back(*field);
    csv += util::JoinCsvRow(row) + "\n";
  }
  WritePath(a.out, csv, out);
  if (skipped) err << "decode: skipped " << skipped << " malformed lines\n";
  return kExitOk;
}

// ---------------------------------------------------------------- monitor

struct MonitorArgs {
  std::string config;
  int location = -1;
  std::string replay;
  std::string out;
  std::string start = "2023-05-09T12:00:00";
  std::string audio = "toy";
  double until_s = -1;
  double tone_hz = 1200.0;
};

// Synthetic microphone for replay runs: aircraft events hear a tone in
// noise, silence events hear noise only. Seeds come from the filename so
// reruns are byte-identical.
class SyntheticMicrophone {
 public:
  SyntheticMicrophone(std::string mode, double tone_hz) : mode_(std::move(mode)), tone_hz_(tone_hz) {}
  capture::AudioSource& For(const trigger::RecordingEvent& e) {
    const std::uint64_t seed = Fnv1a(trigger::MakeFilename(e));
    if (mode_ == "toy" && e.event_class == trigger::EventClass::kAircraft) {
      source_ = std::make_unique<capture::ToneInNoiseSource>(tone_hz_, 6000.0, seed, 1500.0);
    } else {
      source_ = std::make_unique<capture::NoiseSource>(seed, 1500.0);
    }
    return *source_;
  }

 private:
  std::string mode_;
  double tone_hz_;
  std::unique_ptr<capture::AudioSource> source_;
};

int Monitor(const MonitorArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  const auto configs = trigger::LoadTriggerConfig(a.config);
  if (configs.empty()) throw UsageError("config has no [location] block");
  const trigger::TriggerConfig cfg = a.location < 0 ? configs.front() : trigger::FindLocation(configs, a.location);
  if (a.audio != "toy" && a.audio != "noise") throw UsageError("--audio must be toy or noise");

  fs::create_directories(a.out);
  SyntheticMicrophone mic(a.audio, a.tone_hz);
  capture::Recorder recorder(a.out, [&](const trigger::RecordingEvent& e) -> capture::AudioSource& {
    return mic.For(e);
  });
  std::size_t actions = 0;
  trigger::MonitorLoop loop(cfg, {}, util::ParseIsoDateTime(a.start), [&](const trigger::Action& act) {
    ++actions;
    recorder.Handle(act);
  });

  std::istringstream lines(ReadPath(a.replay, in));
  std::string line;
  double last = 0.0;
  std::size_t skipped = 0;
  while (std::getline(lines, line)) {
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    try {
      const auto msg_at = line.find("MSG,");
      if (msg_at != std::string::npos) {
        const double t = std::stod(line.substr(0, msg_at));
        loop.OnSbs(adsb::ParseSbsLine(line.substr(msg_at)), t);
        last = std::max(last, t);
      } else {
        const auto timed = adsb::ParseTimedAvrLine(line);
        loop.OnFrame(adsb::ParseFrame(timed.frame), timed.t_s);
        last = std::max(last, timed.t_s);
      }
    } catch (const Error&) {
      ++skipped;
    } catch (const std::invalid_argument&) {
      ++skipped;
    }
  }
  loop.Finish(a.until_s >= 0 ? a.until_s : last);

  std::size_t aircraft = 0;
  for (const auto& row : recorder.written()) aircraft += row.event_class == trigger::EventClass::kAircraft;
  out << "recordings " << recorder.written().size() << " (aircraft " << aircraft << ", silence "
      << recorder.written().size() - aircraft << "), aborted " << recorder.aborted() << ", underruns "
      << recorder.underruns() << ", actions " << actions << "\n";
  for (const auto& row : recorder.written()) out << "  " << row.filename << "\n";
  if (skipped) err << "monitor: skipped " << skipped << " malformed lines\n";
  return kExitOk;
}

// ---------------------------------------------------------------- build-dataset

struct BuildArgs {
  std::string recordings;
  std::string out;
  bool accept_unreviewed = false;
  std::string registry;
  std::vector<std::string> sources;
  double session_gap_s = 7200.0;
};

int BuildDatasetCmd(const BuildArgs& a, std::ostream& out) {
  dataset::CurateOptions opt;
  opt.accept_unreviewed = a.accept_unreviewed;
  opt.session_gap_s = a.session_gap_s;
  std::optional<dataset::AirframeRegistry> registry;
  std::vector<dataset::CsvRegistrationSource> sources;
  if (!a.registry.empty()) {
    registry = dataset::AirframeRegistry::Load(a.registry);
    opt.registry = &*registry;
  }
  for (const auto& s : a.sources) sources.push_back(dataset::CsvRegistrationSource::Load(s));
  for (const auto& s : sources) opt.sources.push_back(&s);
  if (!opt.sources.empty() && !opt.registry) throw UsageError("--source needs --registry");

  const auto verdicts = dataset::LoadVerdicts(fs::path(a.recordings) / dataset::kVerdictJournal);
  const auto r = dataset::BuildDataset(a.recordings, a.out, verdicts, opt);
  WritePath((fs::path(a.out) / "summary.csv").string(), dataset::FormatSummary(r.records), out);
  out << "records " << r.records.size() << ", accepted " << r.accepted << ", trimmed " << r.trimmed
      << ", discarded " << r.discarded << ", pending " << r.pending << ", over 10000 ft " << r.over_altitude
      << ", excluded airframes " << r.excluded_airframe << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- features, train, eval

fs::path DefaultCache(const std::string& dataset_dir) { return fs::path(dataset_dir) / "features.bin"; }

std::vector<features::FeatureMatrix> DatasetMatrices(const std::string& dataset_dir, const std::string& cache,
                                                     const std::vector<dataset::SampleRecord>& records) {
  const fs::path path = cache.empty() ? DefaultCache(dataset_dir) : fs::path(cache);
  if (fs::exists(path)) return features::ReadFeatureCache(path);
  return eval::DatasetFeatures(records, fs::path(dataset_dir) / dataset::kAudioDir);
}

struct FeaturesArgs {
  std::string dataset;
  std::string out;
};

int FeaturesCmd(const FeaturesArgs& a, std::ostream& out) {
  const auto records = dataset::LoadIndex(fs::path(a.dataset) / dataset::kIndexFile);
  const auto matrices = eval::DatasetFeatures(records, fs::path(a.dataset) / dataset::kAudioDir);
  const fs::path path = a.out.empty() ? DefaultCache(a.dataset) : fs::path(a.out);
  features::WriteFeatureCache(path, matrices);
  out << "wrote " << matrices.size() << " feature matrices from " << records.size() << " clips to "
      << path.string() << "\n";
  return kExitOk;
}

// Table 3 mirror shared by train and eval: each command fills its own cells.
void UpdateTable3(const std::string& path, const std::string& model, std::size_t first_cell,
                  const std::vector<std::string>& cells) {
  if (path.empty()) return;
  const std::string header = "model,cv_map,cv_std,test_ap,env_map,env_std";
  std::vector<util::CsvRow> rows;
  if (fs::exists(path)) {
    std::ifstream f(path);
    auto parsed = util::ParseCsv(ReadAll(f));
    if (!parsed.empty() && util::JoinCsvRow(parsed.front()) == header) {
      rows.assign(parsed.begin() + 1, parsed.end());
    }
  }
  auto it = std::find_if(rows.begin(), rows.end(), [&](const util::CsvRow& r) { return !r.empty() && r[0] == model; });
  if (it == rows.end()) {
    rows.push_back(util::CsvRow(6, ""));
    rows.back()[0] = model;
    it = rows.end() - 1;
  }
  it->resize(6);
  for (std::size_t i = 0; i < cells.size(); ++i) (*it)[first_cell + i] = cells[i];
  std::string text = header + "\n";
  for (const auto& r : rows) text += util::JoinCsvRow(r) + "\n";
  std::ofstream f(path, std::ios::trunc);
  f << text;
}

std::string Pct(double v) { return Real(v * 100.0, "%.2f"); }

struct TrainArgs {
  std::string dataset;
  std::string model = "logreg";
  std::string features;
  std::string out;
  bool fold_cv = false;
  int epochs = 50;
  int batch_size = 216;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  double c = 1.0;
  std::string table3;
};

int Train(const TrainArgs& a, std::ostream& out) {
  const auto kind = models::ParseModelKind(a.model);
  const auto records = dataset::LoadIndex(fs::path(a.dataset) / dataset::kIndexFile);
  const auto folds = eval::GroupByFold(records, DatasetMatrices(a.dataset, a.features, records));
  const std::vector<models::FeatureSet> cv_folds(folds.begin(), folds.begin() + eval::kCvFolds);
  const fs::path dir = a.out.empty() ? fs::path(a.dataset) / "models" : fs::path(a.out);
  fs::create_directories(dir);

  models::TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch_size;
  cfg.learning_rate = a.lr;
  cfg.seed = a.seed;
  const std::string name(models::ToString(kind));

  if (a.fold_cv) {
    auto run = eval::CrossValidateModel(kind, cv_folds, cfg, a.c);
    std::string csv = "fold,ap\n";
    for (std::size_t k = 0; k < run.models.size(); ++k) {
      const fs::path p = dir / (name + "_fold" + std::to_string(k + 1) + ".bin");
      run.models[k].Save(p);
      csv += std::to_string(k + 1) + "," + Real(run.report.fold_ap[k], "%.6f") + "\n";
      out << "fold " << k + 1 << " ap " << Real(run.report.fold_ap[k], "%.4f") << "  (" << p.string() << ")\n";
    }
    csv += "mean," + Real(run.report.mean, "%.6f") + "\nstd," + Real(run.report.std, "%.6f") + "\n";
    WritePath((dir / (name + "_cv.csv")).string(), csv, out);
    out << name << " cv mAP " << Pct(run.report.mean) << " +/- " << Pct(run.report.std) << "\n";
    UpdateTable3(a.table3, name, 1, {Pct(run.report.mean), Pct(run.report.std)});
  }

  models::FeatureSet train;
  for (const auto& f : cv_folds) train.Append(f);
  auto model = models::TrainedModel::Fit(kind, train, cfg, a.c);
  const fs::path p = dir / (name + ".bin");
  model.Save(p);
  out << "trained " << name << " on " << train.size() << " segments -> " << p.string() << "\n";
  return kExitOk;
}

struct EvalArgs {
  bool test = false;
  bool env = false;
  std::string dataset;
  std::string features;
  std::vector<std::string> models;
  std::vector<std::string> hours;
  std::string pr;
  std::string table5;
  std::string trace_dir;
  std::string table3;
};

int Eval(const EvalArgs& a, std::ostream& out) {
  if (a.test == a.env) throw UsageError("eval needs exactly one of --test or --env");
  if (a.models.empty()) throw UsageError("eval needs --model");
  std::vector<models::TrainedModel> trained;
  for (const auto& m : a.models) trained.push_back(models::TrainedModel::Load(m));

  if (a.test) {
    if (a.dataset.empty()) throw UsageError("eval --test needs --dataset");
    const auto records = dataset::LoadIndex(fs::path(a.dataset) / dataset::kIndexFile);
    const auto folds = eval::GroupByFold(records, DatasetMatrices(a.dataset, a.features, records));
    const auto& test = folds[dataset::kTestFold - 1];
    for (std::size_t m = 0; m < trained.size(); ++m) {
      const auto scores = trained[m].Predict(test);
      const auto curve = eval::PrecisionRecall(scores, test.y);
      out << a.models[m] << " test AP " << Real(curve.average_precision, "%.6f") << " on " << test.size()
          << " segments\n";
      if (!a.pr.empty()) {
        std::string csv = "threshold,precision,recall\n";
        for (const auto& p : curve.points) {
          csv += Real(p.threshold, "%.9g") + "," + Real(p.precision, "%.6f") + "," + Real(p.recall, "%.6f") + "\n";
        }
        WritePath(a.pr, csv, out);
      }
      UpdateTable3(a.table3, std::string(models::ToString(trained[m].kind())), 3, {Pct(curve.average_precision)});
    }
    return kExitOk;
  }

  if (a.hours.empty()) throw UsageError("eval --env needs --hour id=audio.wav,labels.csv");
  std::vector<eval::EnvHour> hours;
  for (const auto& hour_arg : a.hours) {
    const auto eq = hour_arg.find('=');
    const auto comma = hour_arg.find(',', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || comma == std::string::npos) {
      throw UsageError("--hour expects id=audio.wav,labels.csv, got '" + hour_arg + "'");
    }
    const std::string id = hour_arg.substr(0, eq);
    std::ifstream lf(hour_arg.substr(comma + 1));
    if (!lf) throw Error("cannot open " + hour_arg.substr(comma + 1));
    hours.push_back(eval::LoadEnvHour(id, capture::ReadWav(hour_arg.substr(eq + 1, comma - eq - 1)),
                                      dataset::ParseEnvLabels(ReadAll(lf))));
  }
  const auto report = eval::EvaluateEnv(trained, hours);
  WritePath(a.table5, eval::FormatTable5(report), out);
  for (std::size_t m = 0; m < trained.size(); ++m) {
    out << report.models[m] << " pooled AP " << Real(report.pooled[m], "%.6f") << "\n";
  }
  out << "pooled mAP " << Pct(report.pooled_summary.mean) << " +/- " << Pct(report.pooled_summary.std);
  if (report.grand_mean) out << ", per-hour mean " << Pct(*report.grand_mean);
  out << "\n";
  for (const auto& h : report.skipped_hours) out << "hour " << h << " has no aircraft bins, skipped\n";
  if (!a.trace_dir.empty()) {
    fs::create_directories(a.trace_dir);
    for (std::size_t m = 0; m < trained.size(); ++m) {
      for (const auto& h : hours) {
        WritePath((fs::path(a.trace_dir) / (report.models[m] + "_" + h.id + ".csv")).string(),
                  eval::FormatTrace(h.labels, trained[m].Predict(h.segments)), out);
      }
    }
  }
  UpdateTable3(a.table3, std::string(models::ToString(trained.front().kind())), 4,
               {Pct(report.pooled_summary.mean), Pct(report.pooled_summary.std)});
  return kExitOk;
}

// ---------------------------------------------------------------- quantize-env, serve

struct QuantizeArgs {
  std::string events;
  std::string hour_id;
  double hour_len_s = dataset::kHourS;
  std::string out = "-";
};

int Quantize(const QuantizeArgs& a, std::istream& in, std::ostream& out) {
  std::vector<dataset::AnnotatedEvent> events;
  const auto rows = util::ParseCsv(ReadPath(a.events, in));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() < 2) throw Error("events row " + std::to_string(i + 1) + ": expected onset_s,offset_s");
    if (i == 0 && rows[i][0] == "onset_s") continue;
    try {
      events.push_back({std::stod(rows[i][0]), std::stod(rows[i][1])});
    } catch (const std::exception&) {
      throw Error("events row " + std::to_string(i + 1) + ": not a number");
    }
  }
  WritePath(a.out, dataset::FormatEnvLabels(dataset::QuantizeEnvAnnotations(events, a.hour_id, a.hour_len_s)), out);
  return kExitOk;
}

struct ServeArgs {
  std::string recordings;
  std::string dataset;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int Serve(const ServeArgs& a, std::ostream& out) {
  service::ReviewService svc(a.recordings, a.dataset);
  if (svc.Bind(a.host, a.port) < 0) throw Error("cannot bind " + a.host + ":" + std::to_string(a.port));
  out << "review service on http://" << a.host << ":" << svc.port() << "\n" << std::flush;
  return svc.ServeBound() ? kExitOk : kExitDomain;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"skylisten: ADS-B triggered aircraft audio collection, dataset and baselines"};
  app.name("skylisten");
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Emit a message stream for a scenario");
  s->add_option("--scenario", sim.scenario, "Scenario JSON file ('-' for stdin)");
  s->add_option("--approach", sim.approach_km, "Straight flyby passing this many km from the device");
  s->add_option("--config", sim.config, "Trigger config supplying the device position");
  s->add_option("--location", sim.location, "Location block used with --approach");
  s->add_option("--speed-kt", sim.speed_kt);
  s->add_option("--altitude-ft", sim.altitude_ft);
  s->add_option("--start-s", sim.start_s);
  s->add_option("--rate-hz", sim.rate_hz, "Position messages per second");
  s->add_option("--seed", sim.seed);
  s->add_option("--format", sim.format)->check(CLI::IsMember({"avr", "sbs", "json"}));
  s->add_option("--out", sim.out, "Output file, '-' for stdout");

  DecodeArgs dec;
  auto* d = app.add_subcommand("decode", "Decode an AVR stream to CSV");
  d->add_option("--in", dec.in, "AVR lines, optionally prefixed by a timestamp");
  d->add_option("--out", dec.out);
  d->add_option("--receiver", dec.receiver, "lat lon for single-frame decode")->expected(2);

  MonitorArgs mon;
  auto* m = app.add_subcommand("monitor", "Run the trigger loop over a replayed stream and record");
  m->add_option("--config", mon.config, "Location config file")->required();
  m->add_option("--location", mon.location, "Location id (default: first block)");
  m->add_option("--replay", mon.replay, "Timed AVR or SBS stream, '-' for stdin")->required();
  m->add_option("--out", mon.out, "Recording directory")->required();
  m->add_option("--start", mon.start, "Wall-clock time of stream t=0 (YYYY-MM-DDTHH:MM:SS)");
  m->add_option("--audio", mon.audio, "Synthetic microphone: toy (tone for aircraft) or noise");
  m->add_option("--until", mon.until_s, "Run snapshots up to this stream time");
  m->add_option("--tone-hz", mon.tone_hz);

  BuildArgs bld;
  auto* b = app.add_subcommand("build-dataset", "Apply verdicts and build the fold-assigned index");
  b->add_option("--recordings", bld.recordings)->required();
  b->add_option("--out", bld.out)->required();
  b->add_flag("--accept-unreviewed", bld.accept_unreviewed, "Keep recordings that have no verdict");
  b->add_option("--registry", bld.registry, "Airframe registry CSV");
  b->add_option("--source", bld.sources, "Registration source CSV (repeatable)");
  b->add_option("--session-gap-s", bld.session_gap_s);

  FeaturesArgs fea;
  auto* f = app.add_subcommand("features", "Extract MFCC matrices for every indexed clip");
  f->add_option("--dataset", fea.dataset)->required();
  f->add_option("--out", fea.out, "Cache file (default <dataset>/features.bin)");

  TrainArgs trn;
  auto* t = app.add_subcommand("train", "Train a baseline on folds 1-5");
  t->add_option("--dataset", trn.dataset)->required();
  t->add_option("--model", trn.model)->check(CLI::IsMember({"logreg", "mlp", "cnn"}));
  t->add_option("--features", trn.features);
  t->add_option("--out", trn.out, "Checkpoint directory (default <dataset>/models)");
  t->add_flag("--fold-cv", trn.fold_cv, "Also run 5-fold cross validation");
  t->add_option("--epochs", trn.epochs)->check(CLI::PositiveNumber);
  t->add_option("--batch-size", trn.batch_size)->check(CLI::PositiveNumber);
  t->add_option("--lr", trn.lr)->check(CLI::PositiveNumber);
  t->add_option("--seed", trn.seed);
  t->add_option("--c", trn.c, "Inverse L2 strength for logreg")->check(CLI::PositiveNumber);
  t->add_option("--table3", trn.table3, "Results CSV to update");

  EvalArgs evl;
  auto* e = app.add_subcommand("eval", "Score checkpoints on the test fold or environmental hours");
  e->add_flag("--test", evl.test);
  e->add_flag("--env", evl.env);
  e->add_option("--dataset", evl.dataset);
  e->add_option("--features", evl.features);
  e->add_option("--model", evl.models, "Checkpoint (repeatable)");
  e->add_option("--hour", evl.hours, "id=audio.wav,labels.csv (repeatable)");
  e->add_option("--pr", evl.pr, "Write the PR curve CSV here");
  e->add_option("--table5", evl.table5, "Per-hour AP CSV (default stdout)");
  e->add_option("--trace-dir", evl.trace_dir, "Probability traces per model and hour");
  e->add_option("--table3", evl.table3, "Results CSV to update");

  QuantizeArgs qnt;
  auto* q = app.add_subcommand("quantize-env", "Turn onset/offset annotations into 5 s labels");
  q->add_option("--events", qnt.events, "CSV of onset_s,offset_s")->required();
  q->add_option("--hour-id", qnt.hour_id)->required();
  q->add_option("--hour-len-s", qnt.hour_len_s);
  q->add_option("--out", qnt.out);

  ServeArgs srv;
  auto* v = app.add_subcommand("serve", "Run the review service");
  v->add_option("--recordings", srv.recordings)->required();
  v->add_option("--dataset", srv.dataset)->required();
  v->add_option("--host", srv.host);
  v->add_option("--port", srv.port);

  std::vector<std::string> argv_store = {"skylisten"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) return Simulate(sim, in, out);
    if (*d) return Decode(dec, in, out, err);
    if (*m) return Monitor(mon, in, out, err);
    if (*b) return BuildDatasetCmd(bld, out);
    if (*f) return FeaturesCmd(fea, out);
    if (*t) return Train(trn, out);
    if (*e) return Eval(evl, out);
    if (*q) return Quantize(qnt, in, out);
    if (*v) return Serve(srv, out);
  } catch (const UsageError& ex) {
    err << "usage: " << ex.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitDomain;
  } catch (const fs::filesystem_error& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace skylisten::cli
