#include "oatlas/text.h"

#include <locale>
#include <optional>
#include <stdexcept>

namespace oatlas {
namespace {

std::optional<std::locale> LoadUnicodeLocale() {
  for (const char *name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
    try {
      return std::locale(name);
    } catch (const std::runtime_error &) {
    }
  }
  return std::nullopt;
}

const std::ctype<wchar_t> *UnicodeCtype() {
  static const std::optional<std::locale> locale = LoadUnicodeLocale();
  return locale ? &std::use_facet<std::ctype<wchar_t>>(*locale) : nullptr;
}

bool IsAsciiAlnum(char32_t c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

}  // namespace

size_t DecodeUtf8(std::string_view s, size_t pos, char32_t &cp) {
  const auto byte = [&](size_t i) { return static_cast<unsigned char>(s[i]); };
  unsigned char b0 = byte(pos);
  size_t len = 1;
  char32_t value = b0;
  if (b0 >= 0xC0 && b0 < 0xE0) {
    len = 2;
    value = b0 & 0x1F;
  } else if (b0 >= 0xE0 && b0 < 0xF0) {
    len = 3;
    value = b0 & 0x0F;
  } else if (b0 >= 0xF0 && b0 < 0xF8) {
    len = 4;
    value = b0 & 0x07;
  }
  if (len == 1 || pos + len > s.size()) {
    cp = b0;
    return 1;
  }
  for (size_t i = 1; i < len; ++i) {
    unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) {
      cp = b0;
      return 1;
    }
    value = (value << 6) | (b & 0x3F);
  }
  cp = value;
  return len;
}

char32_t CodePointBefore(std::string_view s, size_t pos) {
  size_t start = pos - 1;
  while (start > 0 && pos - start < 4 &&
         (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) {
    --start;
  }
  char32_t cp;
  size_t len = DecodeUtf8(s, start, cp);
  if (start + len != pos) return static_cast<unsigned char>(s[pos - 1]);
  return cp;
}

void AppendUtf8(std::string &out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool IsAlnum(char32_t cp) {
  if (cp < 0x80) return IsAsciiAlnum(cp);
  const std::ctype<wchar_t> *ct = UnicodeCtype();
  return ct != nullptr &&
         ct->is(std::ctype_base::alnum, static_cast<wchar_t>(cp));
}

char32_t ToLower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  const std::ctype<wchar_t> *ct = UnicodeCtype();
  return ct == nullptr ? cp : static_cast<char32_t>(ct->tolower(static_cast<wchar_t>(cp)));
}

char32_t ToUpper(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') ? cp - 32 : cp;
  const std::ctype<wchar_t> *ct = UnicodeCtype();
  return ct == nullptr ? cp : static_cast<char32_t>(ct->toupper(static_cast<wchar_t>(cp)));
}

}  // namespace oatlas
