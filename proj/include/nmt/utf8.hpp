#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nmt::utf8 {

// Decodes a UTF-8 string into code points. Throws std::runtime_error on
// malformed input (bad lead/continuation bytes, overlong forms,
// surrogates, out-of-range values).
std::vector<std::uint32_t> decode(const std::string& s);

std::string encode(std::uint32_t cp);

// Simple case folding for Basic Latin and Latin-1; other code points are
// left unchanged.
std::uint32_t fold(std::uint32_t cp);

// The word split into one string per code point.
std::vector<std::string> codepoints(const std::string& word);

}  // namespace nmt::utf8
