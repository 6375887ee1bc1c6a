// Copyright 2026 The rbcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rbcert/xprec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

#include "rbcert/error.hpp"

namespace rbcert::xprec {
namespace {

// Terms more than this many decades below the largest one cannot change the
// working-precision sum.
constexpr int kNegligibleDecades = kWorkingDigits + 20;

// Exponents beyond this are rejected outright; the tables top out near 3e8.
constexpr std::int64_t kMaxExponent = 1'000'000'000'000'000LL;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::int64_t parse_exponent(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) {
    throw ParseError("missing exponent digits in '" + std::string(whole) + "'");
  }
  std::int64_t value = 0;
  for (char c : s) {
    if (!is_digit(c)) {
      throw ParseError("bad exponent in '" + std::string(whole) + "'");
    }
    value = value * 10 + (c - '0');
    if (value > kMaxExponent) {
      throw ParseError("exponent out of range in '" + std::string(whole) +
                       "'");
    }
  }
  return negative ? -value : value;
}

}  // namespace

const Decimal& ln10() {
  static const Decimal value = boost::multiprecision::log(Decimal(10));
  return value;
}

BigLog BigLog::from_log10(Decimal log10_magnitude) {
  if (!boost::multiprecision::isfinite(log10_magnitude)) {
    throw DomainError("BigLog magnitude must be finite");
  }
  BigLog out;
  out.positive_ = true;
  out.log10_ = std::move(log10_magnitude);
  return out;
}

BigLog BigLog::from_double(double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw DomainError("BigLog::from_double needs a finite nonnegative value");
  }
  if (value == 0.0) return zero();
  return from_log10(boost::multiprecision::log10(Decimal(value)));
}

Decimal BigLog::natural_log() const {
  if (is_zero()) return -std::numeric_limits<Decimal>::infinity();
  return log10_ * ln10();
}

Decimal BigLog::to_decimal() const {
  if (is_zero()) return Decimal(0);
  return boost::multiprecision::exp(log10_ * ln10());
}

double BigLog::to_double() const {
  if (is_zero()) return 0.0;
  if (log10_ < -400) return 0.0;
  if (log10_ > 400) return std::numeric_limits<double>::infinity();
  return std::pow(10.0, static_cast<double>(log10_));
}

std::strong_ordering operator<=>(const BigLog& a, const BigLog& b) {
  if (a.is_zero() || b.is_zero()) {
    return a.positive_ <=> b.positive_;
  }
  if (a.log10_ < b.log10_) return std::strong_ordering::less;
  if (b.log10_ < a.log10_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

BigLog parse_decimal(std::string_view text) {
  const std::string_view s = trim(text);
  const std::string whole(s);
  std::string_view rest = s;
  bool negative = false;
  if (!rest.empty() && (rest.front() == '-' || rest.front() == '+')) {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }

  std::string digits;
  std::int64_t fraction_digits = 0;
  bool seen_point = false;
  std::size_t pos = 0;
  for (; pos < rest.size(); ++pos) {
    const char c = rest[pos];
    if (is_digit(c)) {
      digits.push_back(c);
      if (seen_point) ++fraction_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (digits.empty()) {
    throw ParseError("no mantissa digits in '" + whole + "'");
  }
  std::int64_t exponent = 0;
  if (pos < rest.size()) {
    if (rest[pos] != 'e' && rest[pos] != 'E') {
      throw ParseError("unexpected character in '" + whole + "'");
    }
    exponent = parse_exponent(rest.substr(pos + 1), s);
  }

  const auto first_nonzero = digits.find_first_not_of('0');
  if (first_nonzero == std::string::npos) return BigLog::zero();
  if (negative) {
    throw DomainError("negative value '" + whole +
                      "' (likelihoods are nonnegative)");
  }
  const std::string significant = digits.substr(first_nonzero);
  // value = 0.<significant> * 10^(exponent - fraction_digits + len) ...
  // expressed here as d.ddd * 10^scale.
  const std::int64_t scale =
      exponent - fraction_digits +
      static_cast<std::int64_t>(digits.size() - first_nonzero) - 1;

  std::string mantissa_text;
  mantissa_text.reserve(significant.size() + 1);
  mantissa_text.push_back(significant.front());
  if (significant.size() > 1) {
    mantissa_text.push_back('.');
    mantissa_text.append(significant, 1, std::string::npos);
  }
  const Decimal mantissa(mantissa_text);
  return BigLog::from_log10(boost::multiprecision::log10(mantissa) +
                            Decimal(scale));
}

std::string render_decimal(const BigLog& value, int digits) {
  if (digits < 1 || digits > kMaxRenderDigits) {
    throw DomainError("render digits must lie in [1, 80]");
  }
  if (value.is_zero()) return "0";

  const Decimal& lg = value.log10_magnitude();
  Decimal exponent = boost::multiprecision::floor(lg);
  const Decimal fraction = lg - exponent;
  // mantissa in [1, 10), scaled to an integer with `digits` digits.
  Decimal scaled = boost::multiprecision::round(
      boost::multiprecision::pow(Decimal(10), fraction + (digits - 1)));
  std::string body = scaled.str(0, std::ios_base::fixed);
  if (auto dot = body.find('.'); dot != std::string::npos) body.resize(dot);
  if (static_cast<int>(body.size()) > digits) {
    // 9.99..95 rounded up to 10.00..0
    exponent += 1;
    body.resize(static_cast<std::size_t>(digits));
  }

  std::string out;
  out.reserve(body.size() + 24);
  out.push_back(body.front());
  if (digits > 1) {
    out.push_back('.');
    out.append(body, 1, std::string::npos);
  }
  out.push_back('e');
  const auto e = exponent.convert_to<std::int64_t>();
  out.push_back(e < 0 ? '-' : '+');
  out += std::to_string(e < 0 ? -e : e);
  return out;
}

BigLog mul(const BigLog& a, const BigLog& b) {
  if (a.is_zero() || b.is_zero()) return BigLog::zero();
  return BigLog::from_log10(a.log10_magnitude() + b.log10_magnitude());
}

BigLog div(const BigLog& a, const BigLog& b) {
  if (b.is_zero()) throw DomainError("BigLog division by zero");
  if (a.is_zero()) return BigLog::zero();
  return BigLog::from_log10(a.log10_magnitude() - b.log10_magnitude());
}

std::strong_ordering compare(const BigLog& a, const BigLog& b) {
  return a <=> b;
}

BigLog log_sum(std::span<const BigLog> values,
               std::span<const Decimal> weights) {
  if (values.empty()) throw DomainError("log_sum of an empty sequence");
  if (values.size() != weights.size()) {
    throw DomainError("log_sum: values and weights differ in length");
  }
  const BigLog* largest = nullptr;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] < 0) throw DomainError("log_sum: negative weight");
    if (values[i].is_zero() || weights[i] == 0) continue;
    if (largest == nullptr || *largest < values[i]) largest = &values[i];
  }
  if (largest == nullptr) return BigLog::zero();

  const Decimal& top = largest->log10_magnitude();
  Decimal scaled_sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].is_zero() || weights[i] == 0) continue;
    const Decimal offset = values[i].log10_magnitude() - top;
    if (offset < -kNegligibleDecades) continue;
    scaled_sum += weights[i] * boost::multiprecision::exp(offset * ln10());
  }
  return BigLog::from_log10(top + boost::multiprecision::log10(scaled_sum));
}

BigLog log_sum(std::span<const BigLog> values) {
  const std::vector<Decimal> unit(values.size(), Decimal(1));
  return log_sum(values, unit);
}

BigLog from_natural_log(const Decimal& ln_value) {
  if (boost::multiprecision::isnan(ln_value)) {
    throw DomainError("from_natural_log: NaN");
  }
  if (boost::multiprecision::isinf(ln_value)) {
    if (ln_value < 0) return BigLog::zero();
    throw DomainError("from_natural_log: +inf");
  }
  return BigLog::from_log10(ln_value / ln10());
}

BigLog from_natural_log(double ln_value) {
  if (std::isinf(ln_value) && ln_value < 0) return BigLog::zero();
  if (!std::isfinite(ln_value)) {
    throw DomainError("from_natural_log: non-finite value");
  }
  return from_natural_log(Decimal(ln_value));
}

std::ostream& operator<<(std::ostream& os, const BigLog& value) {
  return os << render_decimal(value, 16);
}

}  // namespace rbcert::xprec
