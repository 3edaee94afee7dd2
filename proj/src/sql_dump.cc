#include "oatlas/sql_dump.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace oatlas {
namespace {

constexpr size_t kMaxRecordedErrors = 100;

bool IsSpace(int c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsWordChar(int c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

bool IsNumberChar(int c) {
  return (c >= '0' && c <= '9') || c == '.' || c == 'e' || c == 'E' ||
         c == '-' || c == '+';
}

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    char x = a[i], y = b[i];
    if (x >= 'a' && x <= 'z') x -= 'a' - 'A';
    if (y >= 'a' && y <= 'z') y -= 'a' - 'A';
    if (x != y) return false;
  }
  return true;
}

}  // namespace

bool operator==(const SqlValue &a, const SqlValue &b) {
  if (a.type != b.type) return false;
  switch (a.type) {
    case SqlType::kNull:
      return true;
    case SqlType::kInteger:
      return a.integer == b.integer;
    case SqlType::kReal:
      return a.real == b.real;
    case SqlType::kString:
      return a.text == b.text;
  }
  return false;
}

SqlRowReader::SqlRowReader(std::istream &in, ParseMode mode, size_t chunk_size)
    : in_(in), mode_(mode), buffer_(std::max<size_t>(chunk_size, 16)) {
  pos_ = end_ = buffer_.data();
}

bool SqlRowReader::Refill() {
  if (eof_) return false;
  consumed_ += end_ - buffer_.data();
  in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  std::streamsize n = in_.gcount();
  pos_ = buffer_.data();
  end_ = pos_ + n;
  if (n <= 0) {
    eof_ = true;
    return false;
  }
  stats_.bytes += static_cast<uint64_t>(n);
  return true;
}

bool SqlRowReader::SkipComment(int c) {
  // Called with `c` already consumed. Handles "-- ...", "# ..." and
  // "/* ... */".
  if (c == '#' || (c == '-' && Peek() == '-')) {
    int d;
    while ((d = Get()) != kEof && d != '\n') {
    }
    return true;
  }
  if (c == '/' && Peek() == '*') {
    Get();
    int prev = 0, d;
    while ((d = Get()) != kEof) {
      if (prev == '*' && d == '/') break;
      prev = d;
    }
    return true;
  }
  return false;
}

int SqlRowReader::SkipSpace() {
  int c;
  while ((c = Peek()) != kEof && IsSpace(c)) Get();
  return c;
}

void SqlRowReader::SkipQuoted(int quote) {
  int c;
  while ((c = Get()) != kEof) {
    if (c == '\\' && quote != '`') {
      Get();
    } else if (c == quote) {
      return;
    }
  }
}

bool SqlRowReader::ReadWord(std::string &word) {
  word.clear();
  int c;
  while ((c = Peek()) != kEof && IsWordChar(c) && word.size() < 64) {
    word.push_back(static_cast<char>(c));
    Get();
  }
  return !word.empty();
}

void SqlRowReader::SkipStatement() {
  int c;
  while ((c = Get()) != kEof) {
    if (c == ';') return;
    if (c == '\'' || c == '"' || c == '`') {
      SkipQuoted(c);
    } else {
      SkipComment(c);
    }
  }
}

bool SqlRowReader::SeekValues() {
  for (;;) {
    int c = SkipSpace();
    if (c == kEof) return false;
    Get();
    if (c == ';' || SkipComment(c)) continue;
    if (!IsWordChar(c)) {
      SkipStatement();
      continue;
    }
    word_.assign(1, static_cast<char>(c));
    std::string rest;
    ReadWord(rest);
    word_ += rest;
    if (!EqualsIgnoreCase(word_, "INSERT") &&
        !EqualsIgnoreCase(word_, "REPLACE")) {
      SkipStatement();
      continue;
    }
    // Scan the statement header up to VALUES. Column lists and quoted
    // identifiers are skipped.
    bool found = false;
    while (!found) {
      c = Peek();
      if (c == kEof) return false;
      if (IsWordChar(c)) {
        ReadWord(word_);
        if (EqualsIgnoreCase(word_, "VALUES") ||
            EqualsIgnoreCase(word_, "VALUE")) {
          found = true;
        }
        continue;
      }
      Get();
      if (c == ';') break;
      if (c == '\'' || c == '"' || c == '`') {
        SkipQuoted(c);
      } else if (c == '(') {
        int depth = 1, d;
        while (depth > 0 && (d = Get()) != kEof) {
          if (d == '(') {
            ++depth;
          } else if (d == ')') {
            --depth;
          } else if (d == '\'' || d == '"' || d == '`') {
            SkipQuoted(d);
          }
        }
      }
    }
    if (found) return true;
  }
}

void SqlRowReader::Fail(uint64_t offset, std::string message) {
  pending_.byte_offset = offset;
  pending_.message = std::move(message);
}

void SqlRowReader::ReportError() {
  if (mode_ == ParseMode::kStrict) {
    throw DataError("malformed SQL tuple at byte " +
                    std::to_string(pending_.byte_offset) + ": " +
                    pending_.message);
  }
  ++stats_.skipped_rows;
  if (stats_.errors.size() < kMaxRecordedErrors) {
    stats_.errors.push_back(pending_);
  }
}

void SqlRowReader::Recover() {
  int c;
  while ((c = Get()) != kEof) {
    if (c != ')') continue;
    int d = Peek();
    if (d == ',') {
      Get();
      state_ = State::kExpectTuple;
      return;
    }
    if (d == ';') {
      Get();
      state_ = State::kTop;
      return;
    }
  }
  state_ = State::kTop;
}

bool SqlRowReader::ParseString(int quote, std::string &out) {
  uint64_t start = Offset() - 1;
  for (;;) {
    // Copy runs of plain bytes straight out of the chunk.
    const char *run = pos_;
    while (pos_ != end_ && *pos_ != quote && *pos_ != '\\') ++pos_;
    out.append(run, pos_);
    if (out.size() > kMaxFieldBytes) {
      Fail(start, "string field exceeds size limit");
      return false;
    }
    int c = Get();
    if (c == kEof) {
      Fail(start, "unterminated string");
      return false;
    }
    if (c == quote) {
      // SQL also allows a doubled quote inside a string.
      if (Peek() == quote) {
        Get();
        out.push_back(static_cast<char>(quote));
        continue;
      }
      return true;
    }
    if (c == '\\') {
      int e = Get();
      switch (e) {
        case kEof:
          Fail(start, "unterminated string");
          return false;
        case 'n':
          out.push_back('\n');
          break;
        case 'r':
          out.push_back('\r');
          break;
        case 't':
          out.push_back('\t');
          break;
        case '0':
          out.push_back('\0');
          break;
        case 'Z':
          out.push_back('\x1a');
          break;
        default:
          out.push_back(static_cast<char>(e));
          break;
      }
      continue;
    }
    // A plain byte that arrived with a refill.
    out.push_back(static_cast<char>(c));
  }
}

bool SqlRowReader::ParseNumber(int first, SqlValue &value) {
  uint64_t start = Offset() - 1;
  std::string &token = value.text;
  token.assign(1, static_cast<char>(first));
  int c;
  while ((c = Peek()) != kEof && IsNumberChar(c) && token.size() < 64) {
    token.push_back(static_cast<char>(c));
    Get();
  }
  const char *b = token.data();
  const char *e = b + token.size();
  if (*b == '+') ++b;
  bool is_real = token.find_first_of(".eE") != std::string::npos;
  if (!is_real) {
    auto [ptr, ec] = std::from_chars(b, e, value.integer);
    if (ec == std::errc() && ptr == e) {
      value.type = SqlType::kInteger;
      value.real = static_cast<double>(value.integer);
      return true;
    }
  }
  auto [ptr, ec] = std::from_chars(b, e, value.real);
  if (ec == std::errc() && ptr == e) {
    value.type = SqlType::kReal;
    return true;
  }
  Fail(start, "bad numeric literal '" + token + "'");
  return false;
}

bool SqlRowReader::ParseTuple(SqlRow &row) {
  size_t n = 0;
  for (;;) {
    int c = SkipSpace();
    if (c == kEof) {
      Fail(Offset(), "unexpected end of input inside tuple");
      return false;
    }
    uint64_t field_start = Offset();
    Get();
    if (c == ')' && n == 0) break;
    if (n == row.size()) row.emplace_back();
    SqlValue &value = row[n];
    value.text.clear();
    value.integer = 0;
    value.real = 0.0;
    if (c == '\'' || c == '"') {
      if (!ParseString(c, value.text)) return false;
      value.type = SqlType::kString;
    } else if ((c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.') {
      if (!ParseNumber(c, value)) return false;
    } else if (IsWordChar(c)) {
      value.text.assign(1, static_cast<char>(c));
      std::string rest;
      ReadWord(rest);
      value.text += rest;
      if (!EqualsIgnoreCase(value.text, "NULL")) {
        Fail(field_start, "unexpected token '" + value.text + "'");
        return false;
      }
      value.text.clear();
      value.type = SqlType::kNull;
    } else {
      Fail(field_start, std::string("unexpected character '") +
                            static_cast<char>(c) + "' in tuple");
      // Leave a closing paren for Recover() to find.
      if (c == ')') --pos_;
      return false;
    }
    ++n;
    c = SkipSpace();
    uint64_t sep = Offset();
    Get();
    if (c == ')') break;
    if (c != ',') {
      Fail(sep, c == kEof ? std::string("unexpected end of input inside tuple")
                          : std::string("expected ',' or ')' but found '") +
                                static_cast<char>(c) + "'");
      return false;
    }
  }
  if (row.size() > n) row.resize(n);
  return true;
}

void SqlRowReader::TrackMemory(const SqlRow &row) {
  size_t bytes = buffer_.size() + row.capacity() * sizeof(SqlValue);
  for (const SqlValue &v : row) bytes += v.text.capacity();
  peak_buffer_bytes_ = std::max(peak_buffer_bytes_, bytes);
}

bool SqlRowReader::Next(SqlRow &row) {
  for (;;) {
    switch (state_) {
      case State::kTop:
        if (!SeekValues()) return false;
        state_ = State::kExpectTuple;
        break;
      case State::kExpectSeparator: {
        int c = SkipSpace();
        uint64_t offset = Offset();
        Get();
        if (c == ',') {
          state_ = State::kExpectTuple;
        } else if (c == ';') {
          state_ = State::kTop;
        } else if (c == kEof) {
          state_ = State::kTop;
          return false;
        } else {
          Fail(offset, std::string("expected ',' or ';' after tuple, found '") +
                           static_cast<char>(c) + "'");
          ReportError();
          Recover();
        }
        break;
      }
      case State::kExpectTuple: {
        int c = SkipSpace();
        uint64_t offset = Offset();
        Get();
        if (c != '(') {
          Fail(offset, c == kEof ? std::string("statement ends without tuple")
                                 : std::string("expected '(' but found '") +
                                       static_cast<char>(c) + "'");
          ReportError();
          if (c == kEof) return false;
          if (c == ';') {
            state_ = State::kTop;
          } else {
            Recover();
          }
          break;
        }
        bool ok = ParseTuple(row);
        TrackMemory(row);
        if (ok) {
          ++stats_.rows;
          state_ = State::kExpectSeparator;
          return true;
        }
        ReportError();
        Recover();
        break;
      }
    }
  }
}

std::vector<SqlRow> ParseSqlInsertRows(std::string_view text, ParseMode mode,
                                       SqlParseStats *stats) {
  std::istringstream in{std::string(text)};
  SqlRowReader reader(in, mode);
  std::vector<SqlRow> rows;
  SqlRow row;
  while (reader.Next(row)) rows.push_back(row);
  if (stats != nullptr) *stats = reader.stats();
  return rows;
}

std::string EscapeSqlString(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\'':
        out += "\\'";
        break;
      case '"':
        out += "\\\"";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\0':
        out += "\\0";
        break;
      case '\x1a':
        out += "\\Z";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

namespace {

void WriteValue(std::ostream &out, const SqlValue &v) {
  switch (v.type) {
    case SqlType::kNull:
      out << "NULL";
      break;
    case SqlType::kInteger:
      out << v.integer;
      break;
    case SqlType::kReal: {
      char buf[64];
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v.real);
      std::string_view text(buf, end - buf);
      out << text;
      // Keep reals distinguishable from integers on the way back in.
      if (text.find_first_of(".eEn") == std::string_view::npos) out << ".0";
      break;
    }
    case SqlType::kString:
      out << '\'' << EscapeSqlString(v.text) << '\'';
      break;
  }
}

}  // namespace

void WriteSqlInsert(std::ostream &out, std::string_view table,
                    std::span<const SqlRow> rows, size_t rows_per_statement) {
  rows_per_statement = std::max<size_t>(rows_per_statement, 1);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (i % rows_per_statement == 0) {
      out << "INSERT INTO `" << table << "` VALUES ";
    } else {
      out << ',';
    }
    out << '(';
    for (size_t f = 0; f < rows[i].size(); ++f) {
      if (f > 0) out << ',';
      WriteValue(out, rows[i][f]);
    }
    out << ')';
    if (i % rows_per_statement == rows_per_statement - 1 ||
        i + 1 == rows.size()) {
      out << ";\n";
    }
  }
}

}  // namespace oatlas
