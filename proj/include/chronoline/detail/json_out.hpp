#pragma once

// Minimal JSON emission with shortest round-trip number formatting.
// nlohmann/json is used for parsing and string escaping only.

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "../error.hpp"

namespace chronoline::detail {

inline std::string format_real(double v) {
  require(std::isfinite(v), "cannot serialize non-finite value");
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  require(ec == std::errc{}, "number formatting failed");
  return std::string(buf.data(), end);
}

inline std::string quote(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

// Streaming writer for a single JSON value. Handles commas; does not validate nesting.
class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& os) : os_(os) {}

  JsonWriter& begin_object() { sep(); os_ << '{'; first_ = true; return *this; }
  JsonWriter& end_object() { os_ << '}'; first_ = false; return *this; }
  JsonWriter& begin_array() { sep(); os_ << '['; first_ = true; return *this; }
  JsonWriter& end_array() { os_ << ']'; first_ = false; return *this; }

  JsonWriter& key(std::string_view k) {
    sep();
    os_ << quote(k) << ':';
    first_ = true;
    return *this;
  }

  JsonWriter& value(double v) { sep(); os_ << format_real(v); return *this; }
  JsonWriter& value(int v) { sep(); os_ << v; return *this; }
  JsonWriter& value(long long v) { sep(); os_ << v; return *this; }
  JsonWriter& value(std::size_t v) { sep(); os_ << v; return *this; }
  JsonWriter& value(bool v) { sep(); os_ << (v ? "true" : "false"); return *this; }
  JsonWriter& value(std::string_view v) { sep(); os_ << quote(v); return *this; }
  JsonWriter& value(const char* v) { return value(std::string_view(v)); }
  JsonWriter& null() { sep(); os_ << "null"; return *this; }

  template <typename Range>
  JsonWriter& array(const Range& r) {
    begin_array();
    for (const auto& x : r) value(x);
    return end_array();
  }

 private:
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }

  std::ostream& os_;
  bool first_ = true;
};

}  // namespace chronoline::detail
