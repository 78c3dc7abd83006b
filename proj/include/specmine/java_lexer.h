#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace specmine::srcmodel {

enum class TokenKind {
  Identifier,
  Keyword,
  IntLiteral,
  FloatLiteral,
  StringLiteral,
  CharLiteral,
  Punct,
};

/// One lexical token. `offset`/`length` address the original unit text so
/// rewrites can substitute identifiers in place.
struct Token {
  TokenKind kind = TokenKind::Punct;
  std::string text;
  std::size_t offset = 0;
  std::size_t line = 1;
  std::size_t column = 1;

  std::size_t end() const { return offset + text.size(); }
  bool is(std::string_view t) const { return text == t && kind != TokenKind::StringLiteral && kind != TokenKind::CharLiteral; }
  bool is_identifier() const { return kind == TokenKind::Identifier; }
};

struct Comment {
  std::string text;
  std::size_t offset = 0;
  std::size_t line = 1;
  std::size_t end_line = 1;
};

struct LexDiagnostic {
  std::string message;
  std::size_t line = 1;
  std::size_t column = 1;
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<Comment> comments;
  std::vector<LexDiagnostic> diagnostics;
};

LexResult lex(std::string_view text);

bool is_java_keyword(std::string_view word);
bool is_primitive_type(std::string_view word);

/// Number of lines carrying at least one token (blank and comment-only lines
/// excluded).
std::size_t count_code_lines(const std::vector<Token>& tokens);

}  // namespace specmine::srcmodel
