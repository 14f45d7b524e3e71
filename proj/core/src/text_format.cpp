#include "text_format.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace egotrack::text {

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    ++number;
    std::string_view raw = text.substr(pos, eol - pos);
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);

    Line line;
    line.number = number;
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
      const std::size_t start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r') ++i;
      if (i > start) line.tokens.push_back(raw.substr(start, i - start));
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  return lines;
}

void Reader::fail(ErrorCode code, const std::string& message) const {
  throw Error(code, std::string(source_) + ":" + std::to_string(line_.number) + ": " + message);
}

void Reader::expect_count(std::size_t n) const {
  if (line_.tokens.size() != n) {
    fail(ErrorCode::kParse, "expected " + std::to_string(n) + " fields, found " +
                                std::to_string(line_.tokens.size()));
  }
}

void Reader::expect_at_least(std::size_t n) const {
  if (line_.tokens.size() < n) {
    fail(ErrorCode::kParse, "expected at least " + std::to_string(n) + " fields, found " +
                                std::to_string(line_.tokens.size()));
  }
}

std::string_view Reader::token(std::size_t i) const {
  if (i >= line_.tokens.size()) fail(ErrorCode::kParse, "missing field " + std::to_string(i + 1));
  return line_.tokens[i];
}

double Reader::real_or_nan(std::size_t i) const {
  const std::string_view tok = token(i);
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    fail(ErrorCode::kParse, "field " + std::to_string(i + 1) + " is not a number: '" +
                                std::string(tok.substr(0, 32)) + "'");
  }
  return value;
}

double Reader::real(std::size_t i) const {
  const double value = real_or_nan(i);
  if (!std::isfinite(value)) fail(ErrorCode::kParse, "field " + std::to_string(i + 1) + " is not finite");
  return value;
}

std::int64_t Reader::integer(std::size_t i) const {
  const std::string_view tok = token(i);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    fail(ErrorCode::kParse, "field " + std::to_string(i + 1) + " is not an integer: '" +
                                std::string(tok.substr(0, 32)) + "'");
  }
  return value;
}

int Reader::small_int(std::size_t i) const {
  const std::int64_t v = integer(i);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    fail(ErrorCode::kParse, "field " + std::to_string(i + 1) + " is out of range");
  }
  return static_cast<int>(v);
}

void append_real(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ec == std::errc() ? ptr : buf);
}

void append_int(std::string& out, std::int64_t value) {
  char buf[24];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ec == std::errc() ? ptr : buf);
}

}  // namespace egotrack::text
