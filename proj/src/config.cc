#include "oatlas/config.h"

#include <algorithm>
#include <fstream>
#include <thread>

#include "oatlas/tsv.h"

namespace oatlas {

namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Month ParseMonthOrThrow(std::string_view text, std::string_view key) {
  if (auto m = Month::Parse(Trim(text))) return *m;
  throw ConfigError(std::string(key) + ": bad month '" + std::string(text) + "'");
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value);

template <>
int64_t ParseNumber<int64_t>(std::string_view key, std::string_view value) {
  if (auto v = ParseInt(value)) return *v;
  throw ConfigError(std::string(key) + ": expected an integer, got '" +
                    std::string(value) + "'");
}

template <>
double ParseNumber<double>(std::string_view key, std::string_view value) {
  if (auto v = ParseDouble(value)) return *v;
  throw ConfigError(std::string(key) + ": expected a number, got '" +
                    std::string(value) + "'");
}

}  // namespace

MonthRange ParseMonthRange(std::string_view text) {
  text = Trim(text);
  const auto dots = text.find("..");
  MonthRange range;
  if (dots == std::string_view::npos) {
    range.first = range.last = ParseMonthOrThrow(text, "months");
  } else {
    range.first = ParseMonthOrThrow(text.substr(0, dots), "months");
    range.last = ParseMonthOrThrow(text.substr(dots + 2), "months");
  }
  if (range.last < range.first) {
    throw ConfigError("months: range ends before it starts: " + std::string(text));
  }
  return range;
}

bool RunConfig::WantsLanguage(std::string_view language) const {
  if (all_languages) return true;
  return std::find(languages.begin(), languages.end(), language) != languages.end();
}

unsigned RunConfig::WorkerCount() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void ApplyConfigValue(RunConfig &config, std::string_view key,
                      std::string_view value, const std::filesystem::path &base_dir) {
  key = Trim(key);
  value = Trim(value);
  if (key == "data_root") {
    std::filesystem::path p{std::string(value)};
    config.data_root = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  } else if (key == "languages") {
    config.languages.clear();
    config.all_languages = value == "*";
    if (!config.all_languages) {
      size_t pos = 0;
      while (pos <= value.size()) {
        auto comma = value.find(',', pos);
        if (comma == std::string_view::npos) comma = value.size();
        auto item = Trim(value.substr(pos, comma - pos));
        if (!item.empty()) config.languages.emplace_back(item);
        pos = comma + 1;
      }
      std::sort(config.languages.begin(), config.languages.end());
      config.languages.erase(
          std::unique(config.languages.begin(), config.languages.end()),
          config.languages.end());
    }
  } else if (key == "months") {
    config.months = ParseMonthRange(value);
  } else if (key == "treatment_month") {
    config.treatment_month = ParseMonthOrThrow(value, key);
  } else if (key == "parse_mode") {
    if (value == "strict") {
      config.parse_mode = ParseMode::kStrict;
    } else if (value == "lenient") {
      config.parse_mode = ParseMode::kLenient;
    } else {
      throw ConfigError("parse_mode must be strict or lenient");
    }
  } else if (key == "window") {
    config.window = static_cast<int>(ParseNumber<int64_t>(key, value));
  } else if (key == "min_pairs") {
    const auto v = ParseNumber<int64_t>(key, value);
    if (v < 0) throw ConfigError("min_pairs must be non-negative");
    config.min_pairs = static_cast<size_t>(v);
  } else if (key == "lowess_bandwidth") {
    config.lowess_bandwidth = ParseNumber<double>(key, value);
  } else if (key == "out") {
    config.out = std::filesystem::path{std::string(value)};
  } else if (key == "seed") {
    const auto v = ParseUnsigned(value);
    if (!v) throw ConfigError("seed must be a non-negative integer");
    config.seed = *v;
  } else if (key == "threads") {
    const auto v = ParseNumber<int64_t>(key, value);
    if (v < 0 || v > 1024) throw ConfigError("threads must be in [0, 1024]");
    config.threads = static_cast<unsigned>(v);
  } else if (key == "findlink_case_insensitive") {
    const auto v = ParseBool(value);
    if (!v) throw ConfigError("findlink_case_insensitive must be a boolean");
    config.findlink_case_insensitive = *v;
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void ApplyConfigText(RunConfig &config, std::istream &in,
                     const std::filesystem::path &base_dir) {
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = Trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_number) +
                        ": expected key = value");
    }
    ApplyConfigValue(config, view.substr(0, eq), view.substr(eq + 1), base_dir);
  }
}

void ApplyConfigFile(RunConfig &config, const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  ApplyConfigText(config, in, path.parent_path());
}

void ValidateConfig(const RunConfig &config) {
  if (config.data_root.empty()) throw ConfigError("data_root is not set");
  if (config.window < 1) throw ConfigError("window must be at least 1");
  if (!(config.lowess_bandwidth > 0.0 && config.lowess_bandwidth <= 1.0)) {
    throw ConfigError("lowess_bandwidth must be in (0, 1]");
  }
  if (config.out.empty()) throw ConfigError("out is not set");
  if (config.months && config.treatment_month &&
      !config.months->Contains(*config.treatment_month)) {
    throw ConfigError("treatment_month lies outside months");
  }
}

}  // namespace oatlas
