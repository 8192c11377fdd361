#include "rmtlab/recurrence_cache.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rmtlab/errors.hpp"

namespace rmtlab {

namespace fs = std::filesystem;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

constexpr const char* kMagic = "# rmtlab recurrence table v1";

}  // namespace

RecurrenceCache::RecurrenceCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path RecurrenceCache::resolve_dir(const std::string& configured) {
  if (const char* env = std::getenv(kCacheDirEnv); env && *env) return env;
  if (!configured.empty()) return configured;
  return ".rmtlab-cache";
}

fs::path RecurrenceCache::path_for(const std::string& key) const {
  char name[40];
  std::snprintf(name, sizeof name, "rec_%016llx.txt", static_cast<unsigned long long>(fnv1a(key)));
  return dir_ / name;
}

void write_recurrence(std::ostream& os, const std::string& key, const RecurrenceTable& tab) {
  char buf[128];
  os << kMagic << '\n' << "key " << key << '\n';
  std::snprintf(buf, sizeof buf, "N %.17g\nn_max %d\nnode_count %d\ninterval_radius %.17g\nlog_beta0 %.17g\n", tab.N,
                tab.n_max, tab.node_count, tab.interval_radius, tab.log_beta0);
  os << buf;
  for (int k = 0; k <= tab.n_max; ++k) {
    // beta_0 is reconstructed from log_beta0 on load; it may overflow.
    const double b = (k == 0 && !std::isfinite(tab.beta[0])) ? 0.0 : tab.beta[k];
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", k, tab.alpha[k], b);
    os << buf;
  }
}

std::optional<RecurrenceTable> read_recurrence(std::istream& is, const std::string& key) {
  std::string line;
  if (!std::getline(is, line) || line != kMagic) throw IoError("recurrence file: bad header");
  if (!std::getline(is, line) || line.rfind("key ", 0) != 0) throw IoError("recurrence file: missing key");
  if (line.substr(4) != key) return std::nullopt;
  RecurrenceTable tab;
  std::string name;
  auto expect = [&](const char* field, auto& value) {
    if (!(is >> name >> value) || name != field) throw IoError(std::string("recurrence file: missing ") + field);
  };
  expect("N", tab.N);
  expect("n_max", tab.n_max);
  expect("node_count", tab.node_count);
  expect("interval_radius", tab.interval_radius);
  expect("log_beta0", tab.log_beta0);
  if (tab.n_max < 1) throw IoError("recurrence file: bad n_max");
  tab.alpha.resize(tab.n_max + 1);
  tab.beta.resize(tab.n_max + 1);
  for (int k = 0; k <= tab.n_max; ++k) {
    int idx = -1;
    if (!(is >> idx >> tab.alpha[k] >> tab.beta[k]) || idx != k) throw IoError("recurrence file: truncated table");
  }
  tab.beta[0] = std::exp(tab.log_beta0);
  return tab;
}

std::optional<RecurrenceTable> RecurrenceCache::load(const std::string& key) const {
  std::ifstream in(path_for(key));
  if (!in) return std::nullopt;
  try {
    return read_recurrence(in, key);
  } catch (const IoError&) {
    return std::nullopt;  // a corrupt cache entry is rebuilt
  }
}

void RecurrenceCache::store(const std::string& key, const RecurrenceTable& tab) const {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("recurrence cache: cannot create " + dir_.string() + ": " + ec.message());
  const fs::path target = path_for(key);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("recurrence cache: cannot write " + tmp.string());
    write_recurrence(out, key, tab);
  }
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("recurrence cache: cannot rename into " + target.string() + ": " + ec.message());
}

RecurrenceTable RecurrenceCache::get_or_build(const Potential& p, double N, int n_max,
                                              const QuadratureConfig& quad) const {
  const std::string key = recurrence_key(p, N, n_max, quad);
  if (auto cached = load(key)) return *cached;
  auto tab = build_recurrence(p, N, n_max, quad);
  store(key, tab);
  return tab;
}

}  // namespace rmtlab
