#ifndef SKYLISTEN_DATASET_REGISTRY_H_
#define SKYLISTEN_DATASET_REGISTRY_H_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "skylisten/dataset/record.h"

namespace skylisten::dataset {

// Engine family from an engine model designation:
//   CFM-56-7B24 -> CFM56, CF34-10E5 -> CF34, PT6A-67P -> PT6,
//   V2527-A5 -> V2500, PW127M -> PW100.
std::string EngineFamily(std::string_view engmodel);

// Anything that can name the registration behind a hex code.
class RegistrationSource {
 public:
  virtual ~RegistrationSource() = default;
  virtual std::string name() const = 0;
  virtual std::optional<std::string> Registration(adsb::Icao hex) const = 0;
};

// Two-column CSV (hex,registration), the offline form of a web lookup.
class CsvRegistrationSource : public RegistrationSource {
 public:
  CsvRegistrationSource(std::string name, std::string_view csv);
  static CsvRegistrationSource Load(const std::filesystem::path& path);

  std::string name() const override { return name_; }
  std::optional<std::string> Registration(adsb::Icao hex) const override;

 private:
  std::string name_;
  std::map<adsb::Icao, std::string> table_;
};

// The primary airframe registry: CSV keyed by "hex" with "registration",
// the descriptive feature columns and an optional "military" flag column
// ("1"/"true" excludes the airframe). Unknown columns are ignored;
// engfamily is always derived from engmodel.
class AirframeRegistry {
 public:
  explicit AirframeRegistry(std::string_view csv);
  static AirframeRegistry Load(const std::filesystem::path& path);

  struct Entry {
    AirframeMeta meta;
    bool military = false;
  };
  const Entry* Find(adsb::Icao hex) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<adsb::Icao, Entry> table_;
};

// Registration accepted when a strict majority of the responding sources,
// and at least two of them, agree. Features then come from the primary
// registry, whose registration must match when it has one.
AirframeMeta ConsensusLookup(adsb::Icao hex, std::span<const RegistrationSource* const> sources,
                             const AirframeRegistry& primary);

}  // namespace skylisten::dataset

#endif  // SKYLISTEN_DATASET_REGISTRY_H_
