#include <cctype>
#include <charconv>
#include <cmath>

#include "freequiver/errors.hpp"
#include "freequiver/expr.hpp"

namespace freequiver {

namespace {

std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool is_leaf(const Expr& e) {
  return e.kind() == ExprKind::Atom || e.kind() == ExprKind::Id || e.kind() == ExprKind::Zero;
}

bool is_negative_real(Complex k) { return k.imag() == 0.0 && std::signbit(k.real()); }

std::string render_node(const Expr& e);

// Operand of juxtaposition: leaves and inverses stand alone, the rest is bracketed.
std::string render_factor(const Expr& e) {
  if (e.kind() == ExprKind::Scale && e.scalar() == Complex(1.0, 0.0)) return render_factor(e.child());
  if (is_leaf(e) || e.kind() == ExprKind::Inv) return render_node(e);
  return "(" + render_node(e) + ")";
}

// k e without sign handling; Mul bodies need no brackets since scalars lead a term.
std::string render_scaled(Complex k, const Expr& e) {
  const bool bracket = e.kind() == ExprKind::Add || e.kind() == ExprKind::Scale;
  const std::string body = bracket ? "(" + render_node(e) + ")" : render_node(e);
  if (k == Complex(1.0, 0.0)) return body;
  return format_scalar(k) + " " + body;
}

std::string render_term(const Expr& e, bool leading) {
  if (e.kind() == ExprKind::Scale) {
    if (e.scalar() == Complex(1.0, 0.0)) return render_term(e.child(), leading);
    if (is_negative_real(e.scalar())) {
      return (leading ? "-" : " - ") + render_scaled(-e.scalar(), e.child());
    }
    return (leading ? "" : " + ") + render_scaled(e.scalar(), e.child());
  }
  const std::string body = e.kind() == ExprKind::Add ? "(" + render_node(e) + ")" : render_node(e);
  return leading ? body : " + " + body;
}

std::string render_node(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Atom: return e.name();
    case ExprKind::Id: return "id{" + e.name() + "}";
    case ExprKind::Zero: return "zero{" + e.name() + "," + e.zero_dst() + "}";
    case ExprKind::Inv: {
      std::string suffix = "^-1";
      if (e.inv_mode() == InvMode::Left) suffix += "L";
      if (e.inv_mode() == InvMode::Right) suffix += "R";
      Expr c = e.child();
      while (c.kind() == ExprKind::Scale && c.scalar() == Complex(1.0, 0.0)) c = c.child();
      return (is_leaf(c) ? render_node(c) : "(" + render_node(c) + ")") + suffix;
    }
    case ExprKind::Scale:
      return render_term(e, true);
    case ExprKind::Add: {
      std::string out;
      for (std::size_t i = 0; i < e.children().size(); ++i) out += render_term(e.children()[i], i == 0);
      return out;
    }
    case ExprKind::Mul: {
      std::string out;
      for (const auto& c : e.children()) {
        if (!out.empty()) out += ' ';
        out += render_factor(c);
      }
      return out;
    }
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }
  static bool number_start(char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '.'; }

  std::string identifier() {
    skip_ws();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected a name");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  double number(bool allow_sign) {
    skip_ws();
    const std::size_t start = pos_;
    if (allow_sign && pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '-' || text_[look] == '+')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    if (!token.empty() && token[0] == '+') token.erase(0, 1);
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  Expr parse_sum() {
    std::vector<Expr> terms;
    terms.push_back(parse_term());
    while (true) {
      if (accept('+')) {
        terms.push_back(parse_term());
      } else if (peek() == '-') {
        ++pos_;
        terms.push_back(-parse_term());
      } else {
        break;
      }
    }
    return terms.size() == 1 ? terms.front() : Expr::add(std::move(terms));
  }

  Expr parse_term() {
    Complex k(1.0, 0.0);
    bool scaled = false;
    if (accept('-')) {
      k = -k;
      scaled = true;
    }
    std::vector<Expr> factors;
    while (true) {
      const char c = peek();
      if (number_start(c)) {
        k *= number(false);
        scaled = true;
      } else if (c == '[') {
        ++pos_;
        const double re = number(true);
        expect(',');
        const double im = number(true);
        expect(']');
        k *= Complex(re, im);
        scaled = true;
      } else if (ident_start(c) || c == '(') {
        factors.push_back(parse_factor());
      } else {
        break;
      }
    }
    if (factors.empty()) fail("expected a term; bare scalars need an identity, e.g. 2 id{u}");
    Expr body = factors.size() == 1 ? factors.front() : Expr::mul(std::move(factors));
    return scaled ? Expr::scale(k, body) : body;
  }

  Expr parse_factor() {
    Expr base = parse_primary();
    while (accept('^')) {
      skip_ws();
      if (accept('-')) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '1') fail("only ^-1 is supported for negative powers");
        ++pos_;
        InvMode mode = InvMode::TwoSided;
        if (pos_ < text_.size() && text_[pos_] == 'L') {
          mode = InvMode::Left;
          ++pos_;
        } else if (pos_ < text_.size() && text_[pos_] == 'R') {
          mode = InvMode::Right;
          ++pos_;
        }
        base = Expr::inv(base, mode);
      } else {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        int n = 0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, n);
        if (start == pos_ || res.ec != std::errc() || n < 1) {
          pos_ = start;
          fail("exponent must be a positive integer or -1");
        }
        base = power(base, n);
      }
    }
    return base;
  }

  Expr parse_primary() {
    if (accept('(')) {
      Expr inner = parse_sum();
      expect(')');
      return inner;
    }
    const std::string name = identifier();
    if (name == "id" && accept('{')) {
      std::string v = identifier();
      expect('}');
      return Expr::id(std::move(v));
    }
    if (name == "zero" && accept('{')) {
      std::string u = identifier();
      expect(',');
      std::string v = identifier();
      expect('}');
      return Expr::zero(std::move(u), std::move(v));
    }
    return Expr::atom(name);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string format_scalar(Complex k) {
  if (k.imag() == 0.0) return format_real(k.real());
  return "[" + format_real(k.real()) + "," + format_real(k.imag()) + "]";
}

std::string Expr::render() const { return render_node(*this); }

Expr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace freequiver
