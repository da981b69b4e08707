#pragma once

#include <string>
#include <string_view>

namespace acclink::utf8 {

// Decodes UTF-8 into Unicode scalar values. Invalid sequences decode to U+FFFD
// one byte at a time so that every input is accepted.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
void append(std::string& out, char32_t cp);

std::size_t length(std::string_view s);

bool is_space(char32_t c);
bool is_digit(char32_t c);
bool is_upper(char32_t c);
bool is_lower(char32_t c);
bool is_letter(char32_t c);
bool is_punct(char32_t c);
char32_t to_lower(char32_t c);

std::string to_lower(std::string_view s);

}  // namespace acclink::utf8
