#ifndef OATLAS_CONFIG_H_
#define OATLAS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oatlas/errors.h"
#include "oatlas/month.h"

namespace oatlas {

struct MonthRange {
  Month first;
  Month last;

  bool Contains(Month m) const { return first <= m && m <= last; }
};

// "2022-08..2022-12" or a single "2022-11". Throws ConfigError.
MonthRange ParseMonthRange(std::string_view text);

struct RunConfig {
  std::filesystem::path data_root;
  // Empty means every language directory under data_root.
  std::vector<std::string> languages;
  bool all_languages = true;
  std::optional<MonthRange> months;
  // Restricts pair construction to one treatment month.
  std::optional<Month> treatment_month;
  ParseMode parse_mode = ParseMode::kLenient;
  int window = 3;
  size_t min_pairs = 30;
  double lowess_bandwidth = 0.67;
  std::filesystem::path out = "oatlas_out";
  uint64_t seed = 42;
  // 0 picks the hardware concurrency.
  unsigned threads = 0;
  bool findlink_case_insensitive = false;

  bool WantsLanguage(std::string_view language) const;
  bool WantsMonth(Month m) const { return !months || months->Contains(m); }
  unsigned WorkerCount() const;
};

// `key = value` lines; '#' starts a comment. Relative data_root paths are
// resolved against `base_dir`.
void ApplyConfigText(RunConfig &config, std::istream &in,
                     const std::filesystem::path &base_dir = {});
void ApplyConfigFile(RunConfig &config, const std::filesystem::path &path);
void ApplyConfigValue(RunConfig &config, std::string_view key,
                      std::string_view value,
                      const std::filesystem::path &base_dir = {});

// Throws ConfigError when the configuration is unusable.
void ValidateConfig(const RunConfig &config);

}  // namespace oatlas

#endif  // OATLAS_CONFIG_H_
