#include "qobdd/text.hpp"

#include <charconv>

#include "qobdd/error.hpp"

namespace qobdd {

bool LineReader::next(std::string &line) {
  if (pushed_back_) {
    pushed_back_ = false;
    line = last_;
    return true;
  }
  while (std::getline(in_, last_)) {
    ++line_no_;
    if (!last_.empty() && last_.back() == '\r')
      last_.pop_back();
    if (last_.find_first_not_of(" \t") == std::string::npos)
      continue;
    line = last_;
    return true;
  }
  return false;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t')
      ++j;
    if (j > i)
      out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::int64_t parse_int(std::string_view token, std::size_t line) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(line, "expected integer, got '" + std::string(token) + "'");
  return value;
}

std::uint64_t parse_uint(std::string_view token, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(line, "expected non-negative integer, got '" + std::string(token) + "'");
  return value;
}

} // namespace qobdd
