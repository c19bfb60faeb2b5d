#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "nlslab/error.hpp"
#include "nlslab/nonlinearity.hpp"

namespace nlslab {

namespace {

class LineCursor {
 public:
  LineCursor(std::string_view text, int line) : text_(text), line_(line) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  int column() const { return static_cast<int>(pos_) + 1; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, column(), msg); }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  // A decimal number, optionally written as a fraction a/b.
  double number() {
    skip_space();
    const int col = column();
    double value = parse_double();
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      const double den = parse_double();
      if (den == 0.0) throw ParseError(line_, col, "zero denominator");
      value /= den;
    }
    return value;
  }

  long integer() {
    skip_space();
    const int col = column();
    long v = 0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) throw ParseError(line_, col, "expected integer");
    pos_ += static_cast<std::size_t>(ptr - begin);
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      throw ParseError(line_, col, "expected integer");
    }
    return v;
  }

 private:
  double parse_double() {
    const int col = column();
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) throw ParseError(line_, col, "expected number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

struct TermLine {
  Monomial monomial;
  int line;
  int column;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + "]";
}

}  // namespace

SystemSpec parse_spec(std::string_view text, std::string name) {
  enum class Section { None, System, Potential };
  Section section = Section::None;
  std::map<std::string, int> seen_line;
  long dimension = 0;
  long p = 0;
  std::vector<double> alpha;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<TermLine> terms;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    LineCursor cur(raw, line_no);
    if (cur.at_end()) {
      if (end == text.size()) break;
      continue;
    }
    if (cur.accept('[')) {
      const std::string sec = cur.identifier();
      cur.expect(']');
      if (!cur.at_end()) cur.fail("unexpected text after section header");
      if (sec == "system") {
        section = Section::System;
      } else if (sec == "potential") {
        section = Section::Potential;
      } else {
        throw ParseError(line_no, 2, "unknown section '" + sec + "'");
      }
      continue;
    }

    const int key_col = cur.column();
    const std::string key = cur.identifier();
    cur.expect('=');
    if (section == Section::None) throw ParseError(line_no, key_col, "key outside of a section");

    if (section == Section::System) {
      if (seen_line.count(key)) throw ParseError(line_no, key_col, "duplicate key '" + key + "'");
      seen_line[key] = line_no;
      if (key == "dimension") {
        const int col = cur.column();
        dimension = cur.integer();
        if (dimension < 1 || dimension > 3) throw ParseError(line_no, col, "dimension must be 1, 2 or 3");
      } else if (key == "p") {
        const int col = cur.column();
        p = cur.integer();
        if (p < 2) throw ParseError(line_no, col, "p must be an integer >= 2");
      } else if (key == "alpha" || key == "gamma" || key == "beta") {
        std::vector<double>& target = key == "alpha" ? alpha : key == "gamma" ? gamma : beta;
        cur.expect('[');
        if (!cur.accept(']')) {
          do {
            const int col = cur.column();
            const double v = cur.number();
            if (key != "beta" && !(v > 0.0)) {
              throw ParseError(line_no, col, key + " entries must be strictly positive");
            }
            if (key == "beta" && v < 0.0) throw ParseError(line_no, col, "beta entries must be nonnegative");
            target.push_back(v);
          } while (cur.accept(','));
          cur.expect(']');
        }
      } else {
        throw ParseError(line_no, key_col, "unknown key '" + key + "'");
      }
    } else {
      if (key != "term") throw ParseError(line_no, key_col, "unknown key '" + key + "'");
      TermLine t;
      t.line = line_no;
      t.column = key_col;
      const double re = cur.number();
      const double im = cur.number();
      t.monomial.coeff = cplx(re, im);
      cur.expect(':');
      do {
        const int col = cur.column();
        const long a = cur.integer();
        const long b = cur.integer();
        if (a < 0 || b < 0) throw ParseError(line_no, col, "exponents must be nonnegative");
        t.monomial.exps.push_back({static_cast<int>(a), static_cast<int>(b)});
      } while (cur.accept('|'));
      terms.push_back(std::move(t));
    }
    if (!cur.at_end()) cur.fail("unexpected trailing text");
  }

  const int eof_line = line_no;
  for (const char* required : {"dimension", "p", "alpha", "gamma", "beta"}) {
    if (!seen_line.count(required)) {
      throw ParseError(eof_line, 1, std::string("missing required key '") + required + "'");
    }
  }
  const std::size_t l = alpha.size();
  if (l == 0) throw ParseError(seen_line["alpha"], 1, "alpha must not be empty");
  if (gamma.size() != l) throw ParseError(seen_line["gamma"], 1, "gamma length differs from alpha");
  if (beta.size() != l) throw ParseError(seen_line["beta"], 1, "beta length differs from alpha");
  if (terms.empty()) throw ParseError(eof_line, 1, "nontrivial potential required");

  int max_degree = 0;
  for (const auto& t : terms) {
    if (t.monomial.exps.size() != l) {
      throw ParseError(t.line, t.column,
                       "dimension mismatch: term has " + std::to_string(t.monomial.exps.size()) +
                           " exponent pairs, expected " + std::to_string(l));
    }
    max_degree = std::max(max_degree, t.monomial.degree());
  }
  if (max_degree - 1 != p) {
    throw ParseError(seen_line["p"], 1,
                     "declared p = " + std::to_string(p) + " but the highest term degree is " +
                         std::to_string(max_degree));
  }
  for (const auto& t : terms) {
    if (t.monomial.degree() != p + 1) {
      throw ParseError(t.line, t.column,
                       "non-homogeneous term: degree " + std::to_string(t.monomial.degree()) +
                           " != p+1 = " + std::to_string(p + 1));
    }
  }

  Potential pot;
  pot.components = static_cast<int>(l);
  pot.p = static_cast<int>(p);
  std::vector<Monomial> monomials;
  for (auto& t : terms) monomials.push_back(std::move(t.monomial));
  pot.F = Polynomial(pot.components, std::move(monomials));
  if (pot.F.empty()) throw ParseError(eof_line, 1, "nontrivial potential required");
  return make_system(std::move(name), static_cast<int>(dimension), std::move(alpha), std::move(gamma),
                     std::move(beta), pot);
}

std::string serialize_spec(const SystemSpec& spec) {
  std::ostringstream os;
  os << "[system]\n";
  os << "dimension = " << spec.dim << "\n";
  os << "p = " << spec.p << "\n";
  os << "alpha = " << format_list(spec.alpha) << "\n";
  os << "gamma = " << format_list(spec.gamma) << "\n";
  os << "beta = " << format_list(spec.beta) << "\n";
  os << "\n[potential]\n";
  for (const auto& m : spec.potential.F.terms()) {
    os << "term = " << format_double(m.coeff.real()) << " " << format_double(m.coeff.imag()) << " :";
    for (std::size_t j = 0; j < m.exps.size(); ++j) {
      os << (j ? " | " : " ") << m.exps[j].z << " " << m.exps[j].zbar;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace nlslab
