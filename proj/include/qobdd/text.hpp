#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace qobdd {

/// Line-oriented reader shared by the text formats. Tracks 1-based line
/// numbers and skips blank lines.
class LineReader {
public:
  explicit LineReader(std::istream &in) : in_(in) {}

  /// Next non-blank line, or false at end of input.
  bool next(std::string &line);
  /// Puts the last line back; the following `next` returns it again.
  void unread() noexcept { pushed_back_ = true; }
  std::size_t line_no() const noexcept { return line_no_; }

private:
  std::istream &in_;
  std::string last_;
  std::size_t line_no_ = 0;
  bool pushed_back_ = false;
};

std::vector<std::string_view> split_ws(std::string_view line);

/// Strict integer parsing; throws ParseError(line) on anything else.
std::int64_t parse_int(std::string_view token, std::size_t line);
std::uint64_t parse_uint(std::string_view token, std::size_t line);

} // namespace qobdd
