#include "cohesive/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace cohesive {

struct Expression::Node {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call1, Call2 } kind;
  double value = 0.0;
  std::string name;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0, std::string name = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = v;
  n->name = std::move(name);
  return n;
}

bool is_unary_fn(const std::string& s) {
  static const char* names[] = {"exp", "log", "sqrt", "sin", "cos", "asin", "acos", "acosh", "tanh", "atanh", "abs"};
  for (const char* n : names) {
    if (s == n) return true;
  }
  return false;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << msg << " at position " << pos_ << " in \"" << s_ << "\"";
    throw Error(ErrorKind::ParseError, os.str());
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr n = term();
    while (true) {
      if (accept('+')) n = make(Kind::Add, n, term());
      else if (accept('-')) n = make(Kind::Sub, n, term());
      else return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    while (true) {
      if (accept('*')) n = make(Kind::Mul, n, unary());
      else if (accept('/')) n = make(Kind::Div, n, unary());
      else return n;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, base, unary());
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Kind::Number, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "t") return make(Kind::Var);
      if (id == "pi") return make(Kind::Number, nullptr, nullptr, M_PI, "pi");
      if (is_unary_fn(id)) {
        expect('(');
        NodePtr a = expr();
        expect(')');
        return make(Kind::Call1, a, nullptr, 0.0, id);
      }
      if (id == "min" || id == "max") {
        expect('(');
        NodePtr a = expr();
        expect(',');
        NodePtr b = expr();
        expect(')');
        return make(Kind::Call2, a, b, 0.0, id);
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    if (accept('(')) {
      NodePtr n = expr();
      expect(')');
      return n;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, double t) {
  switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::Var: return t;
    case Kind::Neg: return -eval(*n.a, t);
    case Kind::Add: return eval(*n.a, t) + eval(*n.b, t);
    case Kind::Sub: return eval(*n.a, t) - eval(*n.b, t);
    case Kind::Mul: return eval(*n.a, t) * eval(*n.b, t);
    case Kind::Div: return eval(*n.a, t) / eval(*n.b, t);
    case Kind::Pow: {
      double b = eval(*n.a, t), e = eval(*n.b, t);
      if (e == 2.0) return b * b;
      return std::pow(b, e);
    }
    case Kind::Call1: {
      double x = eval(*n.a, t);
      const std::string& f = n.name;
      if (f == "exp") return std::exp(x);
      if (f == "log") return std::log(x);
      if (f == "sqrt") return std::sqrt(x);
      if (f == "sin") return std::sin(x);
      if (f == "cos") return std::cos(x);
      if (f == "asin") return std::asin(x);
      if (f == "acos") return std::acos(x);
      if (f == "acosh") return std::acosh(x);
      if (f == "tanh") return std::tanh(x);
      if (f == "atanh") return std::atanh(x);
      if (f == "abs") return std::abs(x);
      return kNaN;
    }
    case Kind::Call2: {
      double x = eval(*n.a, t), y = eval(*n.b, t);
      return n.name == "min" ? std::min(x, y) : std::max(x, y);
    }
  }
  return kNaN;
}

void print(const Expression::Node& n, std::ostream& os) {
  auto bin = [&](const char* op) {
    os << '(';
    print(*n.a, os);
    os << op;
    print(*n.b, os);
    os << ')';
  };
  switch (n.kind) {
    case Kind::Number:
      if (n.name == "pi") {
        os << "pi";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        os << buf;
      }
      break;
    case Kind::Var: os << 't'; break;
    case Kind::Neg:
      os << "(-";
      print(*n.a, os);
      os << ')';
      break;
    case Kind::Add: bin("+"); break;
    case Kind::Sub: bin("-"); break;
    case Kind::Mul: bin("*"); break;
    case Kind::Div: bin("/"); break;
    case Kind::Pow: bin("^"); break;
    case Kind::Call1:
      os << n.name << '(';
      print(*n.a, os);
      os << ')';
      break;
    case Kind::Call2:
      os << n.name << '(';
      print(*n.a, os);
      os << ',';
      print(*n.b, os);
      os << ')';
      break;
  }
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.source_ = text;
  return e;
}

double Expression::operator()(double t) const { return eval(*root_, t); }

std::string Expression::str() const {
  std::ostringstream os;
  print(*root_, os);
  return os.str();
}

ScalarFn Expression::fn() const {
  auto root = root_;
  return [root](double t) { return eval(*root, t); };
}

}  // namespace cohesive
