#ifndef OATLAS_MONTH_H_
#define OATLAS_MONTH_H_

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace oatlas {

// A calendar month, written YYYY-MM.
class Month {
 public:
  constexpr Month() = default;
  constexpr Month(int year, int month) : index_(year * 12 + (month - 1)) {}

  // Returns nullopt unless `text` is exactly YYYY-MM with month in 1..12.
  static std::optional<Month> Parse(std::string_view text);

  int year() const { return index_ / 12; }
  int month() const { return index_ % 12 + 1; }

  Month Plus(int months) const {
    Month m;
    m.index_ = index_ + months;
    return m;
  }
  Month Next() const { return Plus(1); }
  Month Prev() const { return Plus(-1); }

  // Signed number of months from `other` to this month.
  int MonthsSince(Month other) const { return index_ - other.index_; }

  std::string ToString() const;

  friend auto operator<=>(const Month &, const Month &) = default;

 private:
  int index_ = 0;
};

}  // namespace oatlas

#endif  // OATLAS_MONTH_H_
