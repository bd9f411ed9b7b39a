#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace decolog {

enum class TokenKind { Ident, Number, Meta, Symbol, Newline, End };

struct Token {
  TokenKind kind;
  std::string text;
  int line;
  int column;
};

// Shared tokenizer for every textual format of the project. `#` starts a
// comment running to end of line. Newline tokens are emitted only when
// `keep_newlines` is set (the line-oriented formats).
std::vector<Token> tokenize(std::string_view text, bool keep_newlines);

// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const;
  const Token& next();
  bool at_end() const { return peek().kind == TokenKind::End; }

  bool is_symbol(std::string_view s, std::size_t ahead = 0) const;
  bool is_ident(std::string_view s, std::size_t ahead = 0) const;
  bool accept_symbol(std::string_view s);
  bool accept_ident(std::string_view s);
  void expect_symbol(std::string_view s);
  void expect_keyword(std::string_view s);
  std::string expect_ident(std::string_view what);
  std::string expect_name_or_number(std::string_view what);
  long expect_number(std::string_view what);

  // Skip newline tokens; returns how many were skipped.
  int skip_newlines();
  void expect_line_end();

  [[noreturn]] void fail(const std::string& message) const;
  [[noreturn]] void fail_at(const Token& tok, const std::string& message) const;

  std::size_t position() const { return pos_; }
  void rewind(std::size_t pos) { pos_ = pos; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string describe(const Token& tok);

}  // namespace decolog
