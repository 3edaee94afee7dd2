#include "oatlas/month.h"

#include <cstdio>

namespace oatlas {

std::optional<Month> Month::Parse(std::string_view text) {
  if (text.size() != 7 || text[4] != '-') return std::nullopt;
  int value[2] = {0, 0};
  const std::string_view parts[2] = {text.substr(0, 4), text.substr(5, 2)};
  for (int p = 0; p < 2; ++p) {
    for (char c : parts[p]) {
      if (c < '0' || c > '9') return std::nullopt;
      value[p] = value[p] * 10 + (c - '0');
    }
  }
  if (value[1] < 1 || value[1] > 12) return std::nullopt;
  return Month(value[0], value[1]);
}

std::string Month::ToString() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year(), month());
  return buf;
}

}  // namespace oatlas
