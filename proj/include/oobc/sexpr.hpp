#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oobc {

struct SourcePos {
  int line = 0;
  int column = 0;
};

std::string to_string(SourcePos pos);

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(SourcePos pos, const std::string& message);
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

// A datum read from S-expression text. `[` `]` are accepted as list
// brackets so Racket-style cond clauses read like ordinary lists.
struct SExpr {
  enum class Kind { List, Symbol, String, Integer };

  Kind kind = Kind::List;
  std::string text;            // symbol name or string contents
  std::int64_t integer = 0;
  std::vector<SExpr> items;
  SourcePos pos;

  bool is_list() const { return kind == Kind::List; }
  bool is_symbol() const { return kind == Kind::Symbol; }
  bool is_symbol(std::string_view name) const { return kind == Kind::Symbol && text == name; }
  bool is_string() const { return kind == Kind::String; }
  bool is_integer() const { return kind == Kind::Integer; }

  // Head symbol of a non-empty list, empty otherwise.
  std::string_view head() const;
};

// Reads every top-level datum. `;` starts a comment running to end of line.
std::vector<SExpr> read_sexprs(std::string_view text);

std::string quote_string(std::string_view raw);

}  // namespace oobc
