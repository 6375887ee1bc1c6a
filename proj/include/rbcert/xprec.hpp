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

// Extended-precision, log-domain arithmetic for nonnegative scalars.
//
// Likelihoods of large tomographic datasets routinely fall far below the
// smallest IEEE double (values like 1e-306872481 are normal here). A BigLog
// stores such a value as the base-10 logarithm of its magnitude, carried in
// a 100-significant-digit MPFR float, so products are sums of logarithms and
// sums are evaluated by factoring out the largest term.

#ifndef RBCERT_XPREC_HPP_
#define RBCERT_XPREC_HPP_

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include <boost/multiprecision/mpfr.hpp>

namespace rbcert::xprec {

/// Number of significant decimal digits carried by Decimal.
inline constexpr unsigned kWorkingDigits = 100;

/// Largest mantissa digit count render_decimal() promises to get right.
inline constexpr int kMaxRenderDigits = 80;

/// Extended-precision real used for log magnitudes, prior weights and any
/// other quantity that must survive 80-digit bookkeeping.
using Decimal = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<kWorkingDigits>,
    boost::multiprecision::et_off>;

/// ln(10) at working precision.
const Decimal& ln10();

/// A nonnegative real stored as (is_zero, log10 |x|). Immutable.
class BigLog {
 public:
  /// Exactly zero.
  BigLog() = default;

  static BigLog zero() { return BigLog(); }
  static BigLog one() { return from_log10(Decimal(0)); }
  /// The positive value 10^log10_magnitude. The argument must be finite.
  static BigLog from_log10(Decimal log10_magnitude);
  /// Converts an ordinary double (must be >= 0 and finite).
  static BigLog from_double(double value);

  bool is_zero() const { return !positive_; }
  /// Base-10 logarithm of the value; meaningless when is_zero().
  const Decimal& log10_magnitude() const { return log10_; }
  /// Natural logarithm; -inf for zero.
  Decimal natural_log() const;
  /// The value as a Decimal (only sensible for values within the Decimal
  /// exponent range, e.g. posteriors of moderate size). Zero stays zero.
  Decimal to_decimal() const;
  /// Nearest double; underflows to 0 and overflows to +inf silently.
  double to_double() const;

  friend std::strong_ordering operator<=>(const BigLog& a, const BigLog& b);
  friend bool operator==(const BigLog& a, const BigLog& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  bool positive_ = false;
  Decimal log10_ = 0;
};

/// Parses `<digit>[.<digits>]e<+|-><digits>` or a plain nonnegative decimal
/// such as "0.1666". Throws ParseError on malformed input and DomainError on
/// negative values.
BigLog parse_decimal(std::string_view text);

/// Scientific rendering with `digits` significant mantissa digits, e.g.
/// "2.50e-1". Zero renders as "0". Digits must be in [1, kMaxRenderDigits].
std::string render_decimal(const BigLog& value, int digits);

BigLog mul(const BigLog& a, const BigLog& b);
/// Throws DomainError when b is zero.
BigLog div(const BigLog& a, const BigLog& b);
std::strong_ordering compare(const BigLog& a, const BigLog& b);

/// sum_i weights[i] * values[i], evaluated relative to the largest term.
/// Throws DomainError on empty input, mismatched lengths or negative weights.
BigLog log_sum(std::span<const BigLog> values,
               std::span<const Decimal> weights);
/// Unit-weight sum.
BigLog log_sum(std::span<const BigLog> values);

/// Converts a natural logarithm to a BigLog. -inf maps to zero; +inf or NaN
/// throws DomainError.
BigLog from_natural_log(const Decimal& ln_value);
BigLog from_natural_log(double ln_value);

std::ostream& operator<<(std::ostream& os, const BigLog& value);

}  // namespace rbcert::xprec

#endif  // RBCERT_XPREC_HPP_
