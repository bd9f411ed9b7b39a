#include "lexer.hpp"

#include <array>
#include <cctype>

#include "decolog/error.hpp"

namespace decolog {
namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

// Longest match first.
constexpr std::array<std::string_view, 26> kSymbols = {
    "~exc", "~st", "==", "~~", ":=", "->", "<", ">", "|", "(", ")", "[", "]",
    ",",    ":",   "+",  "*",  "-",  ";", "{", "}", "=", "%", "/", "!", "."};

}  // namespace

std::vector<Token> tokenize(std::string_view text, bool keep_newlines) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (c == '\n') {
      if (keep_newlines) out.push_back({TokenKind::Newline, "\n", line, col});
      advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    int tl = line;
    int tc = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() &&
             (ident_char(text[j]) ||
              // dotted rule names such as R8'.pi1
              (text[j] == '.' && j + 1 < text.size() && ident_start(text[j + 1]) &&
               j > i && text[j - 1] != '.'))) {
        ++j;
      }
      out.push_back({TokenKind::Ident, std::string(text.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '?' && i + 1 < text.size() && ident_start(text[i + 1])) {
      std::size_t j = i + 1;
      while (j < text.size() && ident_char(text[j])) ++j;
      out.push_back({TokenKind::Meta, std::string(text.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({TokenKind::Number, std::string(text.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (std::string_view sym : kSymbols) {
      if (text.substr(i, sym.size()) == sym) {
        // `~exc`/`~st` must not swallow a longer identifier.
        if (sym.size() > 2 && sym[0] == '~' && i + sym.size() < text.size() &&
            ident_char(text[i + sym.size()])) {
          continue;
        }
        out.push_back({TokenKind::Symbol, std::string(sym), tl, tc});
        advance(sym.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw ParseError(tl, tc, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({TokenKind::End, "", line, col});
  return out;
}

std::string describe(const Token& tok) {
  switch (tok.kind) {
    case TokenKind::End:
      return "end of input";
    case TokenKind::Newline:
      return "end of line";
    default:
      return "'" + tok.text + "'";
  }
}

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t idx = pos_ + ahead;
  if (idx >= tokens_.size()) return tokens_.back();
  return tokens_[idx];
}

const Token& TokenStream::next() {
  const Token& t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool TokenStream::is_symbol(std::string_view s, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokenKind::Symbol && t.text == s;
}

bool TokenStream::is_ident(std::string_view s, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokenKind::Ident && t.text == s;
}

bool TokenStream::accept_symbol(std::string_view s) {
  if (!is_symbol(s)) return false;
  next();
  return true;
}

bool TokenStream::accept_ident(std::string_view s) {
  if (!is_ident(s)) return false;
  next();
  return true;
}

void TokenStream::expect_symbol(std::string_view s) {
  if (!accept_symbol(s)) {
    fail("expected '" + std::string(s) + "', found " + describe(peek()));
  }
}

void TokenStream::expect_keyword(std::string_view s) {
  if (!accept_ident(s)) {
    fail("expected '" + std::string(s) + "', found " + describe(peek()));
  }
}

std::string TokenStream::expect_ident(std::string_view what) {
  if (peek().kind != TokenKind::Ident) {
    fail("expected " + std::string(what) + ", found " + describe(peek()));
  }
  return next().text;
}

std::string TokenStream::expect_name_or_number(std::string_view what) {
  if (peek().kind != TokenKind::Ident && peek().kind != TokenKind::Number) {
    fail("expected " + std::string(what) + ", found " + describe(peek()));
  }
  return next().text;
}

long TokenStream::expect_number(std::string_view what) {
  if (peek().kind != TokenKind::Number) {
    fail("expected " + std::string(what) + ", found " + describe(peek()));
  }
  const Token& t = next();
  try {
    return std::stol(t.text);
  } catch (const std::exception&) {
    fail_at(t, "number out of range");
  }
}

int TokenStream::skip_newlines() {
  int n = 0;
  while (peek().kind == TokenKind::Newline) {
    next();
    ++n;
  }
  return n;
}

void TokenStream::expect_line_end() {
  if (peek().kind == TokenKind::End) return;
  if (peek().kind != TokenKind::Newline) {
    fail("expected end of line, found " + describe(peek()));
  }
  next();
}

void TokenStream::fail(const std::string& message) const { fail_at(peek(), message); }

void TokenStream::fail_at(const Token& tok, const std::string& message) const {
  throw ParseError(tok.line, tok.column, message);
}

}  // namespace decolog
