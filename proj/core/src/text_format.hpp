#pragma once

// Internal helpers shared by the text codecs.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "egotrack/error.hpp"

namespace egotrack::text {

struct Line {
  std::size_t number = 0;  // 1-based
  std::vector<std::string_view> tokens;
};

/// Splits into non-empty lines of whitespace-separated tokens with `#` comments removed.
std::vector<Line> tokenize(std::string_view text);

class Reader {
 public:
  Reader(std::string_view source, const Line& line) : source_(source), line_(line) {}

  [[noreturn]] void fail(ErrorCode code, const std::string& message) const;
  void expect_count(std::size_t n) const;
  void expect_at_least(std::size_t n) const;

  double real(std::size_t i) const;  // finite only
  double real_or_nan(std::size_t i) const;
  std::int64_t integer(std::size_t i) const;
  int small_int(std::size_t i) const;
  std::string_view token(std::size_t i) const;
  std::size_t size() const { return line_.tokens.size(); }

 private:
  std::string_view source_;
  const Line& line_;
};

void append_real(std::string& out, double value);
void append_int(std::string& out, std::int64_t value);

}  // namespace egotrack::text
