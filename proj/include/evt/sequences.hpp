#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace evt {

/// value(n) = coeff * n^npow * log(n + shift)^logpow * log(log(n + shift))^loglogpow
///
/// loglogpow is nonzero only for sequences produced by taking the log of a
/// pure log-power (e.g. log k_n with k_n = (log n)^3). The shift is honoured by
/// seq_eval but ignored for every asymptotic comparison.
struct LogPolySeq {
  double coeff = 1.0;
  double npow = 0.0;
  double logpow = 0.0;
  double loglogpow = 0.0;
  double shift = 0.0;

  static LogPolySeq constant(double c) { return {c, 0.0, 0.0, 0.0, 0.0}; }
  static LogPolySeq identity() { return {1.0, 1.0, 0.0, 0.0, 0.0}; }

  /// Exponent vector (npow, logpow, loglogpow); asymptotic order is the
  /// lexicographic order of this vector, coefficient breaking ties.
  std::array<double, 3> exponents() const { return {npow, logpow, loglogpow}; }

  bool operator==(const LogPolySeq&) const = default;
};

struct GrowthClass {
  enum class Kind { ToZero, ToConst, ToInfinity };
  Kind kind;
  double value = 0.0;  // limit, only meaningful for ToConst

  bool operator==(const GrowthClass&) const = default;
};

const char* to_string(GrowthClass::Kind k);

/// Exponents closer than this (relative) are treated as equal.
inline constexpr double kExponentTol = 1e-12;

double seq_eval(const LogPolySeq& s, double n);
LogPolySeq seq_mul(const LogPolySeq& a, const LogPolySeq& b);
LogPolySeq seq_pow(const LogPolySeq& s, double r);
LogPolySeq seq_scale(const LogPolySeq& s, double factor);
/// Leading-order logarithm: a log n when npow > 0, b log log n when npow == 0.
LogPolySeq seq_log(const LogPolySeq& s);

GrowthClass growth_class(const LogPolySeq& s);
GrowthClass ratio_limit(const LogPolySeq& a, const LogPolySeq& b);

/// Sign of the lexicographically first non-negligible entry of v.
int leading_sign(const std::array<double, 3>& v);

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t pos);
  std::size_t position() const { return pos_; }

private:
  std::size_t pos_;
};

/// Parses expressions such as "1.0 * n^-1 * log(n+1)^2" or "sqrt(log(n+1))".
/// Grammar: products/quotients of numbers, n, log(n [+ s]), log(log(n [+ s])),
/// sqrt(...) and parenthesised sub-expressions, each optionally raised to a
/// real power.
LogPolySeq parse_sequence(std::string_view text);

/// Canonical text form; parse_sequence(to_string(s)) == s.
std::string to_string(const LogPolySeq& s);

}  // namespace evt
