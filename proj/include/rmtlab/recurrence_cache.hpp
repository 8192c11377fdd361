#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rmtlab/orthopoly.hpp"

namespace rmtlab {

// Environment variable that overrides any configured cache directory.
inline constexpr const char* kCacheDirEnv = "RMTLAB_CACHE_DIR";

// Text-file cache of recurrence tables, one file per key. Files carry the
// full key and are ignored if it does not match.
class RecurrenceCache {
 public:
  explicit RecurrenceCache(std::filesystem::path dir);

  // $RMTLAB_CACHE_DIR if set, else `configured`, else ".rmtlab-cache".
  static std::filesystem::path resolve_dir(const std::string& configured = {});

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path_for(const std::string& key) const;

  std::optional<RecurrenceTable> load(const std::string& key) const;
  void store(const std::string& key, const RecurrenceTable& tab) const;

  RecurrenceTable get_or_build(const Potential& p, double N, int n_max, const QuadratureConfig& quad = {}) const;

 private:
  std::filesystem::path dir_;
};

void write_recurrence(std::ostream& os, const std::string& key, const RecurrenceTable& tab);
// Returns nullopt on a key mismatch; throws IoError on malformed content.
std::optional<RecurrenceTable> read_recurrence(std::istream& is, const std::string& key);

}  // namespace rmtlab
