#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cds/ast.hpp"

namespace cds {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

Theory parse_theory(std::string_view text);
KnowledgeBase parse_knowledge(std::string_view text, const Theory& theory);
/// Parses one body literal such as `not reach(y)` or `Kx < Kt`.
Literal parse_literal(std::string_view text, const Theory& theory);

struct Bundle {
  std::string name;
  std::string theory_source;
  std::string knowledge_source;
  Theory theory;
  KnowledgeBase knowledge;
};

std::vector<std::string> builtin_bundle_names();
/// Throws std::invalid_argument for unknown names.
Bundle builtin_bundle(const std::string& name);

struct StratificationResult {
  bool ok = true;
  std::vector<std::string> cycle; // p -> ... -> p through a negative edge

  explicit operator bool() const { return ok; }
};

StratificationResult check_stratification(const Theory& theory);

/// Predicates grouped into evaluation strata (lowest first). Base
/// predicates (edge, statics) are not listed.
std::vector<std::vector<std::string>> strata(const Theory& theory);

std::string render_theory(const Theory& theory);
std::string render_knowledge(const KnowledgeBase& kb);
std::string render_literals(const std::vector<Literal>& lits);

} // namespace cds
