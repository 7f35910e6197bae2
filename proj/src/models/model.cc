#include "skylisten/models/model.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace skylisten::models {

namespace {

constexpr char kMagic[8] = {'S', 'K', 'Y', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void U32(std::uint32_t v) { Le(v, 4); }
  void U64(std::uint64_t v) { Le(v, 8); }
  void F64(double v) { Le(std::bit_cast<std::uint64_t>(v), 8); }
  void Bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void Tensor(const std::string& name, const std::vector<int>& shape, const std::vector<double>& values) {
    U32(static_cast<std::uint32_t>(name.size()));
    Bytes(name.data(), name.size());
    U32(static_cast<std::uint32_t>(shape.size()));
    for (int s : shape) U32(static_cast<std::uint32_t>(s));
    for (double v : values) F64(v);
  }
  const std::vector<std::uint8_t>& bytes() const { return out_; }

 private:
  void Le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::vector<std::uint8_t> b) : b_(std::move(b)) {}
  std::uint64_t Le(int n) {
    Need(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  std::uint32_t U32() { return static_cast<std::uint32_t>(Le(4)); }
  double F64() { return std::bit_cast<double>(Le(8)); }
  std::string Str(std::size_t n) {
    Need(n);
    std::string s(b_.begin() + static_cast<std::ptrdiff_t>(pos_), b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  // Reads one named tensor and checks it against the expected layout.
  std::vector<double> Tensor(const std::string& name, const std::vector<int>& shape) {
    const std::string got = Str(U32());
    const std::uint32_t rank = U32();
    std::vector<int> dims(rank);
    for (auto& d : dims) d = static_cast<int>(U32());
    if (got != name || dims != shape) {
      throw ModelError(ModelErrc::kBadCheckpoint, "checkpoint tensor " + got + ShapeString(dims) +
                                                      " where " + name + ShapeString(shape) + " was expected");
    }
    std::size_t count = 1;
    for (int d : dims) count *= static_cast<std::size_t>(d);
    std::vector<double> v(count);
    for (double& x : v) x = F64();
    return v;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  void Need(std::size_t n) {
    if (pos_ + n > b_.size()) throw ModelError(ModelErrc::kBadCheckpoint, "checkpoint is truncated");
  }
  std::vector<std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::vector<int> InputShape(ModelKind kind) {
  return kind == ModelKind::kCnn ? std::vector<int>{13, 216, 1} : std::vector<int>{13, 216};
}

std::unique_ptr<Network> Build(ModelKind kind, std::uint64_t seed) {
  return kind == ModelKind::kCnn ? BuildCnn(seed) : BuildMlp(seed);
}

}  // namespace

std::string_view ToString(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLogReg: return "logreg";
    case ModelKind::kMlp: return "mlp";
    case ModelKind::kCnn: return "cnn";
  }
  return "?";
}

ModelKind ParseModelKind(std::string_view text) {
  if (text == "logreg") return ModelKind::kLogReg;
  if (text == "mlp") return ModelKind::kMlp;
  if (text == "cnn") return ModelKind::kCnn;
  throw ModelError(ModelErrc::kBadSpec, "unknown model kind '" + std::string(text) + "'");
}

void FeatureSet::Add(const features::FeatureMatrix& m, int label) {
  if (m.coeffs.rows != features::kCoeffs || m.coeffs.cols != features::kSegmentFrames) {
    throw ModelError(ModelErrc::kShapeMismatch, m.source + ": expected a 13 x 216 feature matrix");
  }
  x.insert(x.end(), m.coeffs.data.begin(), m.coeffs.data.end());
  y.push_back(label);
  ids.push_back(m.source);
}

void FeatureSet::Append(const FeatureSet& other) {
  x.insert(x.end(), other.x.begin(), other.x.end());
  y.insert(y.end(), other.y.begin(), other.y.end());
  ids.insert(ids.end(), other.ids.begin(), other.ids.end());
}

Tensor FeatureSet::AsTensor(const std::vector<int>& per_sample_shape) const {
  Tensor t;
  t.shape = {static_cast<int>(size())};
  t.shape.insert(t.shape.end(), per_sample_shape.begin(), per_sample_shape.end());
  t.data = x;
  return t;
}

TrainedModel TrainedModel::Fit(ModelKind kind, const FeatureSet& data, const TrainConfig& cfg, double logreg_c) {
  TrainedModel m;
  m.kind_ = kind;
  m.seed_ = cfg.seed;
  if (kind == ModelKind::kLogReg) {
    auto fit = FitLogReg(data.x, kFeatureSize, data.y, logreg_c);
    m.logreg_ = std::move(fit.model);
    m.history_ = std::move(fit.history);
    return m;
  }
  m.net_ = Build(kind, cfg.seed);
  m.history_ = Train(*m.net_, data.AsTensor(InputShape(kind)), data.y, cfg);
  return m;
}

std::vector<double> TrainedModel::Predict(const FeatureSet& data) {
  if (kind_ == ModelKind::kLogReg) return LogRegPredict(logreg_, data.x, kFeatureSize);
  return net_->Predict(data.AsTensor(InputShape(kind_)));
}

void TrainedModel::Save(const std::filesystem::path& path) const {
  Writer w;
  w.Bytes(kMagic, sizeof kMagic);
  w.U32(kVersion);
  w.U32(static_cast<std::uint32_t>(kind_));
  w.U64(seed_);
  w.U32(static_cast<std::uint32_t>(history_.size()));
  for (double h : history_) w.F64(h);
  if (kind_ == ModelKind::kLogReg) {
    w.U32(2);
    w.Tensor("coef", {static_cast<int>(logreg_.coef.size())}, logreg_.coef);
    w.Tensor("intercept", {1}, {logreg_.intercept});
  } else {
    const auto params = net_->params();
    w.U32(static_cast<std::uint32_t>(params.size()));
    for (const Param* p : params) w.Tensor(p->name, p->shape, p->value);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw ModelError(ModelErrc::kBadCheckpoint, "cannot write " + path.string());
}

TrainedModel TrainedModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError(ModelErrc::kBadCheckpoint, "cannot open " + path.string());
  Reader r(std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
  if (r.Str(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw ModelError(ModelErrc::kBadCheckpoint, path.string() + " is not a model checkpoint");
  }
  if (r.U32() != kVersion) throw ModelError(ModelErrc::kBadCheckpoint, "unsupported checkpoint version");
  const std::uint32_t kind = r.U32();
  if (kind > 2) throw ModelError(ModelErrc::kBadCheckpoint, "unknown model kind in checkpoint");
  TrainedModel m;
  m.kind_ = static_cast<ModelKind>(kind);
  m.seed_ = r.Le(8);
  m.history_.resize(r.U32());
  for (double& h : m.history_) h = r.F64();
  const std::uint32_t tensors = r.U32();
  if (m.kind_ == ModelKind::kLogReg) {
    if (tensors != 2) throw ModelError(ModelErrc::kBadCheckpoint, "logreg checkpoint needs 2 tensors");
    m.logreg_.coef = r.Tensor("coef", {kFeatureSize});
    m.logreg_.intercept = r.Tensor("intercept", {1})[0];
  } else {
    m.net_ = Build(m.kind_, m.seed_);
    const auto params = m.net_->params();
    if (tensors != params.size()) throw ModelError(ModelErrc::kBadCheckpoint, "checkpoint tensor count mismatch");
    for (Param* p : params) p->value = r.Tensor(p->name, p->shape);
  }
  if (!r.done()) throw ModelError(ModelErrc::kBadCheckpoint, "trailing bytes in checkpoint");
  return m;
}

}  // namespace skylisten::models
