#include "oobc/sexpr.hpp"

#include <cctype>
#include <charconv>

namespace oobc {

std::string to_string(SourcePos pos) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

SyntaxError::SyntaxError(SourcePos pos, const std::string& message)
    : std::runtime_error(to_string(pos) + ": " + message), pos_(pos) {}

std::string_view SExpr::head() const {
  if (kind != Kind::List || items.empty() || !items.front().is_symbol()) return {};
  return items.front().text;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_blank();
    while (!at_end()) {
      out.push_back(read());
      skip_blank();
    }
    return out;
  }

 private:
  bool at_end() const { return offset_ >= text_.size(); }
  char peek() const { return text_[offset_]; }
  SourcePos here() const { return {line_, column_}; }

  char advance() {
    char c = text_[offset_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip_blank() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  static bool is_delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '[' ||
           c == ']' || c == '"' || c == ';';
  }

  SExpr read() {
    SourcePos start = here();
    char c = peek();
    if (c == '(' || c == '[') return read_list(start);
    if (c == ')' || c == ']') throw SyntaxError(start, std::string("unexpected '") + c + "'");
    if (c == '"') return read_string(start);
    return read_atom(start);
  }

  SExpr read_list(SourcePos start) {
    char open = advance();
    char close = open == '(' ? ')' : ']';
    SExpr list;
    list.kind = SExpr::Kind::List;
    list.pos = start;
    skip_blank();
    while (true) {
      if (at_end()) throw SyntaxError(start, std::string("unterminated list opened with '") + open + "'");
      char c = peek();
      if (c == ')' || c == ']') {
        if (c != close) {
          throw SyntaxError(here(), std::string("mismatched '") + c + "', expected '" + close + "'");
        }
        advance();
        return list;
      }
      list.items.push_back(read());
      skip_blank();
    }
  }

  SExpr read_string(SourcePos start) {
    advance();
    SExpr s;
    s.kind = SExpr::Kind::String;
    s.pos = start;
    while (true) {
      if (at_end()) throw SyntaxError(start, "unterminated string literal");
      char c = advance();
      if (c == '"') return s;
      if (c == '\\') {
        if (at_end()) throw SyntaxError(start, "unterminated string literal");
        char e = advance();
        switch (e) {
          case 'n': s.text.push_back('\n'); break;
          case 't': s.text.push_back('\t'); break;
          case '\\': s.text.push_back('\\'); break;
          case '"': s.text.push_back('"'); break;
          default:
            throw SyntaxError(here(), std::string("unknown escape '\\") + e + "'");
        }
      } else {
        s.text.push_back(c);
      }
    }
  }

  SExpr read_atom(SourcePos start) {
    std::size_t begin = offset_;
    while (!at_end() && !is_delimiter(peek())) advance();
    std::string_view token = text_.substr(begin, offset_ - begin);
    SExpr atom;
    atom.pos = start;
    if (looks_numeric(token)) {
      std::int64_t value = 0;
      auto first = token.data() + (token.front() == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw SyntaxError(start, "integer literal out of range: " + std::string(token));
      }
      atom.kind = SExpr::Kind::Integer;
      atom.integer = value;
      atom.text = std::string(token);
      return atom;
    }
    atom.kind = SExpr::Kind::Symbol;
    atom.text = std::string(token);
    return atom;
  }

  static bool looks_numeric(std::string_view token) {
    std::size_t i = 0;
    if (token.size() > 1 && (token[0] == '-' || token[0] == '+')) i = 1;
    if (i >= token.size()) return false;
    for (; i < token.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(token[i]))) return false;
    }
    return true;
  }

  std::string_view text_;
  std::size_t offset_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text) { return Reader(text).read_all(); }

std::string quote_string(std::string_view raw) {
  std::string out = "\"";
  for (char c : raw) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

}  // namespace oobc
