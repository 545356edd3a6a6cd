#include "nmt/utf8.hpp"

#include <stdexcept>

namespace nmt::utf8 {

static void bad(std::size_t pos) {
  throw std::runtime_error("invalid UTF-8 at byte " + std::to_string(pos));
}

std::vector<std::uint32_t> decode(const std::string& s) {
  std::vector<std::uint32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char b0 = s[i];
    std::uint32_t cp = 0;
    int extra = 0;
    if (b0 < 0x80) {
      cp = b0;
    } else if (b0 >= 0xC2 && b0 <= 0xDF) {
      cp = b0 & 0x1F;
      extra = 1;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
      cp = b0 & 0x0F;
      extra = 2;
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
      cp = b0 & 0x07;
      extra = 3;
    } else {
      bad(i);
    }
    if (extra > 0 && i + extra >= s.size()) bad(i);
    for (int k = 1; k <= extra; ++k) {
      unsigned char b = s[i + k];
      if ((b & 0xC0) != 0x80) bad(i + k);
      cp = (cp << 6) | (b & 0x3F);
    }
    // overlong / surrogate / range checks
    if (extra == 1 && cp < 0x80) bad(i);
    if (extra == 2 && cp < 0x800) bad(i);
    if (extra == 3 && cp < 0x10000) bad(i);
    if (cp >= 0xD800 && cp <= 0xDFFF) bad(i);
    if (cp > 0x10FFFF) bad(i);
    out.push_back(cp);
    i += 1 + extra;
  }
  return out;
}

std::string encode(std::uint32_t cp) {
  std::string s;
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else if (cp < 0x800) {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    s += static_cast<char>(0xE0 | (cp >> 12));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    s += static_cast<char>(0xF0 | (cp >> 18));
    s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return s;
}

std::uint32_t fold(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1 capitals
  return cp;
}

std::vector<std::string> codepoints(const std::string& word) {
  std::vector<std::string> out;
  for (std::uint32_t cp : decode(word)) out.push_back(encode(cp));
  return out;
}

}  // namespace nmt::utf8
