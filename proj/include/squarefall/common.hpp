#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace squarefall {

/// Non-negative integer parameter that may also be infinite (the k and m of
/// the large-prime machinery).
class Count {
 public:
  constexpr Count() = default;
  constexpr Count(unsigned value) : value_(value) {}  // NOLINT(implicit)

  static constexpr Count infinite() {
    Count c;
    c.value_ = kInfinite;
    return c;
  }

  constexpr bool is_infinite() const { return value_ == kInfinite; }
  constexpr unsigned value() const { return value_; }

  constexpr bool operator==(const Count&) const = default;
  constexpr bool operator<(const Count& o) const { return value_ < o.value_; }
  constexpr bool operator<=(const Count& o) const { return value_ <= o.value_; }

  /// True when n <= this count (always true for infinity).
  constexpr bool admits(std::uint64_t n) const {
    return is_infinite() || n <= value_;
  }

  std::string to_string() const {
    return is_infinite() ? std::string("inf") : std::to_string(value_);
  }

  /// Parses "inf" / "infinity" or a decimal integer.
  static Count parse(const std::string& text);

 private:
  static constexpr unsigned kInfinite = std::numeric_limits<unsigned>::max();
  unsigned value_ = 0;
};

inline Count Count::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinite();
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a count: '" + text + "'");
  }
  if (used != text.size() || v >= kInfinite)
    throw std::invalid_argument("not a count: '" + text + "'");
  return Count(static_cast<unsigned>(v));
}

inline constexpr double kEulerGamma = 0.57721566490153286061;

}  // namespace squarefall
