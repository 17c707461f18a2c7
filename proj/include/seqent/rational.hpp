#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "seqent/errors.hpp"

namespace seqent {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(static_cast<long double>(num) / den); }

  static Rational make(std::int64_t n, std::int64_t d) {
    if (d == 0) throw ConfigError("zero denominator");
    if (d < 0) n = -n, d = -d;
    const auto g = std::gcd(n < 0 ? -n : n, d);
    return {n / (g ? g : 1), d / (g ? g : 1)};
  }

  // Accepts "p/q", integers and plain decimals such as "0.125".
  static Rational parse(std::string_view s) {
    auto fail = [&] { return ConfigError("not a rational literal: '" + std::string(s) + "'"); };
    auto parse_int = [&](std::string_view t) {
      if (t.empty()) throw fail();
      std::size_t pos = 0;
      long long v = 0;
      try {
        v = std::stoll(std::string(t), &pos);
      } catch (const std::exception&) {
        throw fail();
      }
      if (pos != t.size()) throw fail();
      return static_cast<std::int64_t>(v);
    };
    if (auto slash = s.find('/'); slash != std::string_view::npos)
      return make(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      auto frac = s.substr(dot + 1);
      if (frac.size() > 15) throw fail();
      std::int64_t den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      std::string digits(s.substr(0, dot));
      const bool negative = !digits.empty() && digits[0] == '-';
      const std::int64_t whole = (digits.empty() || digits == "-") ? 0 : parse_int(digits);
      const std::int64_t part = frac.empty() ? 0 : parse_int(frac);
      const std::int64_t mag = (whole < 0 ? -whole : whole) * den + part;
      return make(negative ? -mag : mag, den);
    }
    return make(parse_int(s), 1);
  }
};

}  // namespace seqent
