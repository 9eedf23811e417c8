#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "oobc/sexpr.hpp"
#include "oobc/syntax.hpp"

namespace oobc {

// A well-formed program that breaks a static rule: unknown class, duplicate
// name, dangling label, inheritance cycle, reserved register written.
class SemanticError : public std::runtime_error {
 public:
  SemanticError(SourcePos pos, std::string symbol, const std::string& message);
  const std::string& symbol() const { return symbol_; }
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
  std::string symbol_;
};

// Parses and validates `.oobc` text. Throws SyntaxError or SemanticError.
Program parse_program(std::string_view text);

// Static checks on an already-built AST (parse_program runs these).
void validate_program(const Program& program);

bool is_builtin_class(std::string_view name);

// Label -> index of its `(label l)` statement in the method body.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(const MethodDef& method);

  std::size_t size() const { return index_.size(); }
  bool contains(const std::string& label) const { return index_.count(label) != 0; }
  std::size_t position(const std::string& label) const { return index_.at(label); }
  // The statement suffix starting at the label; a view into the method body.
  std::span<const Stmt> suffix(const std::string& label) const;
  const std::map<std::string, std::size_t>& entries() const { return index_; }

 private:
  const MethodDef* method_ = nullptr;
  std::map<std::string, std::size_t> index_;
};

LabelMap build_label_map(const MethodDef& method);

}  // namespace oobc
