#ifndef OATLAS_SQL_DUMP_H_
#define OATLAS_SQL_DUMP_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oatlas/errors.h"

namespace oatlas {

enum class SqlType {
  kNull,
  kInteger,
  kReal,
  kString,
};

// One scalar from a VALUES tuple. `text` holds the unescaped string for
// kString and the literal token for numbers.
struct SqlValue {
  SqlType type = SqlType::kNull;
  int64_t integer = 0;
  double real = 0.0;
  std::string text;

  static SqlValue Null() { return SqlValue{}; }
  static SqlValue Integer(int64_t v) {
    return SqlValue{SqlType::kInteger, v, static_cast<double>(v), {}};
  }
  static SqlValue Real(double v) { return SqlValue{SqlType::kReal, 0, v, {}}; }
  static SqlValue String(std::string v) {
    return SqlValue{SqlType::kString, 0, 0.0, std::move(v)};
  }

  bool is_null() const { return type == SqlType::kNull; }
  bool is_integer() const { return type == SqlType::kInteger; }
  bool is_string() const { return type == SqlType::kString; }

  friend bool operator==(const SqlValue &a, const SqlValue &b);
};

using SqlRow = std::vector<SqlValue>;

struct SqlRowError {
  uint64_t byte_offset = 0;
  std::string message;
};

struct SqlParseStats {
  uint64_t rows = 0;
  uint64_t skipped_rows = 0;
  uint64_t bytes = 0;
  // The first few errors, for diagnostics. skipped_rows has the full count.
  std::vector<SqlRowError> errors;
};

// Single-pass reader for the tuples of `INSERT INTO ... VALUES (...),(...);`
// statements in a MySQL/MediaWiki dump. Any other statement (CREATE TABLE,
// LOCK, SET, comments) is skipped. Memory use is one fixed-size input chunk
// plus the fields of the tuple being decoded.
//
// Malformed tuples raise DataError in strict mode. In lenient mode the reader
// resynchronizes at the next `),(` or `);` and counts the row as skipped.
class SqlRowReader {
 public:
  static constexpr size_t kDefaultChunkSize = 1 << 16;
  // Fields longer than this are treated as a malformed tuple (an unterminated
  // quote would otherwise swallow the rest of the file).
  static constexpr size_t kMaxFieldBytes = 16 << 20;

  explicit SqlRowReader(std::istream &in, ParseMode mode = ParseMode::kLenient,
                        size_t chunk_size = kDefaultChunkSize);

  SqlRowReader(const SqlRowReader &) = delete;
  SqlRowReader &operator=(const SqlRowReader &) = delete;

  // Decodes the next tuple into `row`, reusing its storage. Returns false at
  // end of input.
  bool Next(SqlRow &row);

  const SqlParseStats &stats() const { return stats_; }

  // High-water mark of the reader's own buffers: the input chunk plus the
  // capacity of the decoded fields.
  size_t peak_buffer_bytes() const { return peak_buffer_bytes_; }

 private:
  enum class State { kTop, kExpectTuple, kExpectSeparator };
  static constexpr int kEof = -1;

  int Get() {
    if (pos_ == end_ && !Refill()) return kEof;
    return static_cast<unsigned char>(*pos_++);
  }
  int Peek() {
    if (pos_ == end_ && !Refill()) return kEof;
    return static_cast<unsigned char>(*pos_);
  }
  uint64_t Offset() const { return consumed_ + (pos_ - buffer_.data()); }
  bool Refill();

  int SkipSpace();
  bool SkipComment(int c);
  bool SeekValues();
  void SkipStatement();
  void SkipQuoted(int quote);
  bool ReadWord(std::string &word);

  bool ParseTuple(SqlRow &row);
  bool ParseString(int quote, std::string &out);
  bool ParseNumber(int first, SqlValue &value);
  void Fail(uint64_t offset, std::string message);
  void ReportError();
  void Recover();
  void TrackMemory(const SqlRow &row);

  std::istream &in_;
  ParseMode mode_;
  std::vector<char> buffer_;
  const char *pos_ = nullptr;
  const char *end_ = nullptr;
  uint64_t consumed_ = 0;
  bool eof_ = false;

  State state_ = State::kTop;
  SqlRowError pending_;
  std::string word_;
  SqlParseStats stats_;
  size_t peak_buffer_bytes_ = 0;
};

// Parses a whole in-memory dump. Intended for tests and small inputs.
std::vector<SqlRow> ParseSqlInsertRows(std::string_view text,
                                       ParseMode mode = ParseMode::kLenient,
                                       SqlParseStats *stats = nullptr);

// MediaWiki/MySQL string escaping: backslash, both quotes, NUL, newline,
// carriage return and ^Z.
std::string EscapeSqlString(std::string_view s);

// Writes `rows` as INSERT statements in mysqldump layout, at most
// `rows_per_statement` tuples per statement.
void WriteSqlInsert(std::ostream &out, std::string_view table,
                    std::span<const SqlRow> rows,
                    size_t rows_per_statement = 1000);

}  // namespace oatlas

#endif  // OATLAS_SQL_DUMP_H_
