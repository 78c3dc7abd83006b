#include "specmine/java_lexer.h"

#include <array>
#include <cctype>
#include <set>
#include <unordered_set>

namespace specmine::srcmodel {
namespace {

const std::unordered_set<std::string_view>& keywords() {
  static const std::unordered_set<std::string_view> kw = {
      "abstract", "assert",     "boolean",   "break",     "byte",      "case",      "catch",
      "char",     "class",      "const",     "continue",  "default",   "do",        "double",
      "else",     "enum",       "extends",   "final",     "finally",   "float",     "for",
      "goto",     "if",         "implements", "import",   "instanceof", "int",      "interface",
      "long",     "native",     "new",       "package",   "private",   "protected", "public",
      "return",   "short",      "static",    "strictfp",  "super",     "switch",    "synchronized",
      "this",     "throw",      "throws",    "transient", "try",       "void",      "volatile",
      "while",    "true",       "false",     "null"};
  return kw;
}

// Longest first. '>' is deliberately never combined with a following '>' so
// nested generic argument lists close one bracket at a time.
constexpr std::array<std::string_view, 32> kPuncts = {
    "...", "<<=", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
    "&=",  "|=",  "^=", "%=", "<<", "(",  ")",  "{",  "}",  "[",  "]",  ";",  ",",  ".",  "@",  "?"};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}
bool ident_part(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  LexResult run() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n') {
        advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      if (c == '/' && peek(1) == '/') {
        line_comment();
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        block_comment();
        continue;
      }
      if (ident_start(c)) {
        identifier();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        number();
        continue;
      }
      if (c == '"') {
        string_literal();
        continue;
      }
      if (c == '\'') {
        char_literal();
        continue;
      }
      punct();
    }
    return std::move(result_);
  }

 private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  Token start(TokenKind kind) const {
    Token t;
    t.kind = kind;
    t.offset = pos_;
    t.line = line_;
    t.column = pos_ - line_start_ + 1;
    return t;
  }

  void finish(Token t) {
    t.text = std::string(text_.substr(t.offset, pos_ - t.offset));
    result_.tokens.push_back(std::move(t));
  }

  void line_comment() {
    Comment c{"", pos_, line_, line_};
    while (pos_ < text_.size() && text_[pos_] != '\n') advance();
    c.text = std::string(text_.substr(c.offset, pos_ - c.offset));
    c.end_line = line_;
    result_.comments.push_back(std::move(c));
  }

  void block_comment() {
    Comment c{"", pos_, line_, line_};
    std::size_t col = pos_ - line_start_ + 1;
    advance();
    advance();
    bool closed = false;
    while (pos_ < text_.size()) {
      if (text_[pos_] == '*' && peek(1) == '/') {
        advance();
        advance();
        closed = true;
        break;
      }
      advance();
    }
    if (!closed) result_.diagnostics.push_back({"unterminated block comment", c.line, col});
    c.text = std::string(text_.substr(c.offset, pos_ - c.offset));
    c.end_line = line_;
    result_.comments.push_back(std::move(c));
  }

  void identifier() {
    Token t = start(TokenKind::Identifier);
    while (pos_ < text_.size() && ident_part(text_[pos_])) advance();
    std::string_view word = text_.substr(t.offset, pos_ - t.offset);
    if (keywords().count(word)) t.kind = TokenKind::Keyword;
    finish(std::move(t));
  }

  void number() {
    Token t = start(TokenKind::IntLiteral);
    bool is_float = false;
    if (text_[pos_] == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'b' || peek(1) == 'B')) {
      advance();
      advance();
      while (pos_ < text_.size() &&
             (std::isxdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        advance();
    } else {
      while (pos_ < text_.size()) {
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '_') {
          advance();
        } else if (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
          is_float = true;
          advance();
        } else if (c == '.' && !is_float && !ident_start(peek(1)) && peek(1) != '.') {
          is_float = true;
          advance();
        } else if ((c == 'e' || c == 'E') &&
                   (std::isdigit(static_cast<unsigned char>(peek(1))) ||
                    ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
          is_float = true;
          advance();
          if (text_[pos_] == '+' || text_[pos_] == '-') advance();
        } else {
          break;
        }
      }
    }
    if (pos_ < text_.size()) {
      char s = text_[pos_];
      if (s == 'l' || s == 'L') {
        advance();
      } else if (s == 'f' || s == 'F' || s == 'd' || s == 'D') {
        is_float = true;
        advance();
      }
    }
    if (is_float) t.kind = TokenKind::FloatLiteral;
    finish(std::move(t));
  }

  void string_literal() {
    Token t = start(TokenKind::StringLiteral);
    if (peek(1) == '"' && peek(2) == '"') {
      // text block
      advance();
      advance();
      advance();
      while (pos_ < text_.size()) {
        if (text_[pos_] == '\\') {
          advance();
          if (pos_ < text_.size()) advance();
          continue;
        }
        if (text_[pos_] == '"' && peek(1) == '"' && peek(2) == '"') {
          advance();
          advance();
          advance();
          finish(std::move(t));
          return;
        }
        advance();
      }
      result_.diagnostics.push_back({"unterminated text block", t.line, t.column});
      finish(std::move(t));
      return;
    }
    advance();
    while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
      advance();
    }
    if (pos_ < text_.size() && text_[pos_] == '"') {
      advance();
    } else {
      result_.diagnostics.push_back({"unterminated string literal", t.line, t.column});
    }
    finish(std::move(t));
  }

  void char_literal() {
    Token t = start(TokenKind::CharLiteral);
    advance();
    while (pos_ < text_.size() && text_[pos_] != '\'' && text_[pos_] != '\n') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
      advance();
    }
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      advance();
    } else {
      result_.diagnostics.push_back({"unterminated character literal", t.line, t.column});
    }
    finish(std::move(t));
  }

  void punct() {
    Token t = start(TokenKind::Punct);
    for (auto p : kPuncts) {
      if (text_.substr(pos_, p.size()) == p) {
        for (std::size_t i = 0; i < p.size(); ++i) advance();
        finish(std::move(t));
        return;
      }
    }
    advance();
    finish(std::move(t));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
  LexResult result_;
};

}  // namespace

LexResult lex(std::string_view text) { return Lexer(text).run(); }

bool is_java_keyword(std::string_view word) { return keywords().count(word) != 0; }

bool is_primitive_type(std::string_view word) {
  static const std::set<std::string_view> prims = {"byte", "short", "int",     "long", "float",
                                                   "double", "boolean", "char", "void"};
  return prims.count(word) != 0;
}

std::size_t count_code_lines(const std::vector<Token>& tokens) {
  std::size_t count = 0;
  std::size_t last = 0;
  for (const auto& t : tokens) {
    if (t.line != last) {
      ++count;
      last = t.line;
    }
  }
  return count;
}

}  // namespace specmine::srcmodel
