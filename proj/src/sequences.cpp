#include "evt/sequences.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "evt/errors.hpp"

namespace evt {

namespace {

bool negligible(double x, double scale = 1.0) { return std::abs(x) <= kExponentTol * scale; }

bool has_log_part(const LogPolySeq& s) { return s.logpow != 0.0 || s.loglogpow != 0.0; }

}  // namespace

const char* to_string(GrowthClass::Kind k) {
  switch (k) {
    case GrowthClass::Kind::ToZero: return "to_zero";
    case GrowthClass::Kind::ToConst: return "to_const";
    case GrowthClass::Kind::ToInfinity: return "to_infinity";
  }
  return "?";
}

double seq_eval(const LogPolySeq& s, double n) {
  if (!(n >= 2.0)) throw DomainError("seq_eval: n must be at least 2");
  double v = std::log(s.coeff) + s.npow * std::log(n);
  const double l = std::log(n + s.shift);
  if (s.logpow != 0.0) v += s.logpow * std::log(l);
  if (s.loglogpow != 0.0) {
    if (!(std::log(l) > 0.0)) throw DomainError("seq_eval: log log(n + shift) is not positive");
    v += s.loglogpow * std::log(std::log(l));
  }
  return std::exp(v);
}

LogPolySeq seq_mul(const LogPolySeq& a, const LogPolySeq& b) {
  double shift = a.shift;
  if (!has_log_part(a)) {
    shift = b.shift;
  } else if (has_log_part(b) && a.shift != b.shift) {
    throw DomainError("seq_mul: factors use different log shifts");
  }
  return {a.coeff * b.coeff, a.npow + b.npow, a.logpow + b.logpow, a.loglogpow + b.loglogpow,
          shift};
}

LogPolySeq seq_pow(const LogPolySeq& s, double r) {
  return {std::pow(s.coeff, r), s.npow * r, s.logpow * r, s.loglogpow * r, s.shift};
}

LogPolySeq seq_scale(const LogPolySeq& s, double factor) {
  if (!(factor > 0.0)) throw DomainError("seq_scale: factor must be positive");
  LogPolySeq out = s;
  out.coeff *= factor;
  return out;
}

LogPolySeq seq_log(const LogPolySeq& s) {
  if (s.npow > 0.0 && !negligible(s.npow)) return {s.npow, 0.0, 1.0, 0.0, s.shift};
  if (negligible(s.npow) && s.logpow > 0.0 && !negligible(s.logpow)) {
    return {s.logpow, 0.0, 0.0, 1.0, s.shift};
  }
  throw DomainError("seq_log: leading term is not n^a (a > 0) or (log n)^b (b > 0)");
}

int leading_sign(const std::array<double, 3>& v) {
  for (double x : v) {
    if (!negligible(x)) return x > 0.0 ? 1 : -1;
  }
  return 0;
}

GrowthClass growth_class(const LogPolySeq& s) {
  switch (leading_sign(s.exponents())) {
    case 1: return {GrowthClass::Kind::ToInfinity, 0.0};
    case -1: return {GrowthClass::Kind::ToZero, 0.0};
    default: return {GrowthClass::Kind::ToConst, s.coeff};
  }
}

GrowthClass ratio_limit(const LogPolySeq& a, const LogPolySeq& b) {
  // Shifts are asymptotically irrelevant, so drop them before dividing.
  LogPolySeq x = a;
  LogPolySeq y = b;
  x.shift = y.shift = 0.0;
  return growth_class(seq_mul(x, seq_pow(y, -1.0)));
}

ParseError::ParseError(const std::string& msg, std::size_t pos)
    : std::runtime_error(msg + " at position " + std::to_string(pos)), pos_(pos) {}

namespace {

class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  LogPolySeq parse() {
    LogPolySeq s = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return s;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool accept_word(std::string_view w) {
    skip_ws();
    if (text_.substr(pos_, w.size()) != w) return false;
    const std::size_t end = pos_ + w.size();
    if (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) return false;
    pos_ = end;
    return true;
  }

  bool at_number() {
    skip_ws();
    return pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.');
  }

  double number() {
    skip_ws();
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return v;
  }

  double signed_number() {
    if (accept('-')) return -number();
    accept('+');
    return number();
  }

  double exponent() {
    if (accept('(')) {
      double v = signed_number();
      if (accept('/')) {
        const std::size_t at = pos_;
        const double d = number();
        if (d == 0.0) throw ParseError("division by zero in exponent", at);
        v /= d;
      }
      expect(')');
      return v;
    }
    return signed_number();
  }

  LogPolySeq expr() {
    LogPolySeq s = term();
    for (;;) {
      const std::size_t at = pos_;
      try {
        if (accept('*')) {
          s = seq_mul(s, term());
        } else if (accept('/')) {
          s = seq_mul(s, seq_pow(term(), -1.0));
        } else {
          return s;
        }
      } catch (const DomainError& e) {
        throw ParseError(e.what(), at);
      }
    }
  }

  LogPolySeq term() {
    LogPolySeq s = primary();
    if (accept('^')) s = seq_pow(s, exponent());
    return s;
  }

  double shift_suffix() {
    if (!accept('+')) return 0.0;
    const std::size_t at = pos_;
    const double v = number();
    if (v < 0.0) throw ParseError("shift must be nonnegative", at);
    return v;
  }

  LogPolySeq primary() {
    skip_ws();
    const std::size_t at = pos_;
    if (at_number()) {
      const double v = number();
      if (!(v > 0.0)) throw ParseError("coefficients must be positive", at);
      return LogPolySeq::constant(v);
    }
    if (accept_word("n")) return LogPolySeq::identity();
    if (accept_word("log")) {
      expect('(');
      LogPolySeq s;
      if (accept_word("log")) {
        expect('(');
        if (!accept_word("n")) fail("expected 'n'");
        s = {1.0, 0.0, 0.0, 1.0, shift_suffix()};
        expect(')');
      } else {
        if (!accept_word("n")) fail("expected 'n' or 'log'");
        s = {1.0, 0.0, 1.0, 0.0, shift_suffix()};
      }
      expect(')');
      return s;
    }
    if (accept_word("sqrt")) {
      expect('(');
      LogPolySeq s = expr();
      expect(')');
      return seq_pow(s, 0.5);
    }
    if (accept('(')) {
      LogPolySeq s = expr();
      expect(')');
      return s;
    }
    fail("expected a number, 'n', 'log', 'sqrt' or '('");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

LogPolySeq parse_sequence(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const LogPolySeq& s) {
  std::string out = fmt_double(s.coeff);
  const std::string arg = s.shift != 0.0 ? "n+" + fmt_double(s.shift) : "n";
  if (s.npow != 0.0) out += " * n^" + fmt_double(s.npow);
  if (s.logpow != 0.0) out += " * log(" + arg + ")^" + fmt_double(s.logpow);
  if (s.loglogpow != 0.0) out += " * log(log(" + arg + "))^" + fmt_double(s.loglogpow);
  return out;
}

}  // namespace evt
