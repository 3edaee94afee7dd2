#ifndef OATLAS_TSV_H_
#define OATLAS_TSV_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace oatlas {

// Line-oriented tab-separated reader. Blank lines and lines starting with '#'
// are skipped. Field views stay valid until the next call to Next().
class TsvReader {
 public:
  explicit TsvReader(std::istream &in) : in_(in) {}

  bool Next(std::vector<std::string_view> &fields);

  // 1-based number of the line returned by the last Next().
  uint64_t line_number() const { return line_number_; }

 private:
  std::istream &in_;
  std::string line_;
  uint64_t line_number_ = 0;
};

std::optional<int64_t> ParseInt(std::string_view s);
std::optional<uint64_t> ParseUnsigned(std::string_view s);
std::optional<double> ParseDouble(std::string_view s);
std::optional<bool> ParseBool(std::string_view s);

// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite.
std::string FormatDouble(double v);

// Renders a string for a TSV cell: tabs, newlines and backslashes escaped.
std::string TsvEscape(std::string_view s);
std::string TsvUnescape(std::string_view s);

}  // namespace oatlas

#endif  // OATLAS_TSV_H_
