#include "skylisten/dataset/registry.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "skylisten/util/csv.h"

namespace skylisten::dataset {

namespace {

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetErrc::kBadIndex, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string Trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string Upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::string EngineFamily(std::string_view engmodel) {
  const std::string m = Upper(Trimmed(engmodel));
  std::size_t i = 0;
  std::string letters;
  while (i < m.size() && std::isalpha(static_cast<unsigned char>(m[i]))) letters += m[i++];
  if (letters.empty()) return m;
  if (i + 1 < m.size() && (m[i] == '-' || m[i] == ' ') && std::isdigit(static_cast<unsigned char>(m[i + 1]))) ++i;
  std::string digits;
  while (i < m.size() && std::isdigit(static_cast<unsigned char>(m[i]))) digits += m[i++];
  if (digits.empty()) return letters;
  if (letters == "V" && digits.size() == 4 && digits.starts_with("25")) return "V2500";
  if (letters == "PW" && digits.size() == 3 && digits[0] == '1') return "PW100";
  return letters + digits;
}

CsvRegistrationSource::CsvRegistrationSource(std::string name, std::string_view csv)
    : name_(std::move(name)) {
  const auto rows = util::ParseCsv(csv);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() < 2) continue;
    if (i == 0 && Upper(r[0]) == "HEX") continue;
    const std::string reg = Trimmed(r[1]);
    if (!reg.empty()) table_[adsb::Icao::FromHex(Trimmed(r[0]))] = Upper(reg);
  }
}

CsvRegistrationSource CsvRegistrationSource::Load(const std::filesystem::path& path) {
  return CsvRegistrationSource(path.stem().string(), Slurp(path));
}

std::optional<std::string> CsvRegistrationSource::Registration(adsb::Icao hex) const {
  const auto it = table_.find(hex);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

AirframeRegistry::AirframeRegistry(std::string_view csv) {
  const auto rows = util::ParseCsv(csv);
  if (rows.empty()) return;
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[Trimmed(rows[0][i])] = i;
  if (!col.count("hex")) throw DatasetError(DatasetErrc::kBadIndex, "airframe registry lacks a hex column");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    auto get = [&](const char* name) -> std::string {
      const auto it = col.find(name);
      return it == col.end() || it->second >= r.size() ? "" : Trimmed(r[it->second]);
    };
    Entry e;
    auto& a = e.meta;
    a.registration = Upper(get("registration"));
    a.airframe = get("airframe");
    a.engtype = get("engtype");
    try {
      if (!get("engnum").empty()) a.engnum = std::stoi(get("engnum"));
      if (!get("mtow_kg").empty()) a.mtow_kg = std::stod(get("mtow_kg"));
    } catch (const std::exception&) {
      throw DatasetError(DatasetErrc::kBadIndex, "airframe registry row " + std::to_string(i) + ": bad number");
    }
    a.shortdesc = get("shortdesc");
    a.typedesig = get("typedesig");
    a.manu = get("manu");
    a.model = get("model");
    a.engmanu = get("engmanu");
    a.engmodel = get("engmodel");
    a.engfamily = a.engmodel.empty() ? "" : EngineFamily(a.engmodel);
    a.fueltype = get("fueltype");
    a.propmanu = get("propmanu");
    a.propmodel = get("propmodel");
    const std::string mil = get("military");
    e.military = mil == "1" || Upper(mil) == "TRUE";
    table_[adsb::Icao::FromHex(get("hex"))] = std::move(e);
  }
}

AirframeRegistry AirframeRegistry::Load(const std::filesystem::path& path) {
  return AirframeRegistry(Slurp(path));
}

const AirframeRegistry::Entry* AirframeRegistry::Find(adsb::Icao hex) const {
  const auto it = table_.find(hex);
  return it == table_.end() ? nullptr : &it->second;
}

AirframeMeta ConsensusLookup(adsb::Icao hex, std::span<const RegistrationSource* const> sources,
                             const AirframeRegistry& primary) {
  if (sources.size() < 2) {
    throw DatasetError(DatasetErrc::kNoConsensus, "consensus needs at least two sources");
  }
  std::map<std::string, int> votes;
  int responding = 0;
  for (const auto* s : sources) {
    if (auto reg = s->Registration(hex)) {
      ++votes[*reg];
      ++responding;
    }
  }
  if (responding == 0) throw DatasetError(DatasetErrc::kUnknownHex, hex.hex() + ": no source knows this hex");
  const std::string* winner = nullptr;
  for (const auto& [reg, n] : votes) {
    if (2 * n > responding && n >= 2) winner = &reg;
  }
  if (!winner) throw DatasetError(DatasetErrc::kNoConsensus, hex.hex() + ": sources disagree on the registration");

  const auto* entry = primary.Find(hex);
  if (!entry) throw DatasetError(DatasetErrc::kUnknownHex, hex.hex() + ": not in the airframe registry");
  if (!entry->meta.registration.empty() && entry->meta.registration != *winner) {
    throw DatasetError(DatasetErrc::kNoConsensus,
                       hex.hex() + ": registry has " + entry->meta.registration + ", sources agree on " + *winner);
  }
  if (entry->military) throw DatasetError(DatasetErrc::kExcludedAirframe, hex.hex() + ": military airframe");
  AirframeMeta meta = entry->meta;
  meta.registration = *winner;
  return meta;
}

}  // namespace skylisten::dataset
