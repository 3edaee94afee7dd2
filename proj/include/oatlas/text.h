#ifndef OATLAS_TEXT_H_
#define OATLAS_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace oatlas {

// Decodes the code point starting at byte `pos`. Invalid bytes decode as
// themselves with length 1. Returns the byte length.
size_t DecodeUtf8(std::string_view s, size_t pos, char32_t &cp);

// Code point ending just before byte `pos`; requires pos > 0.
char32_t CodePointBefore(std::string_view s, size_t pos);

void AppendUtf8(std::string &out, char32_t cp);

// Unicode letters and digits (via the C.UTF-8 locale when available, ASCII
// otherwise).
bool IsAlnum(char32_t cp);
char32_t ToLower(char32_t cp);
char32_t ToUpper(char32_t cp);

}  // namespace oatlas

#endif  // OATLAS_TEXT_H_
