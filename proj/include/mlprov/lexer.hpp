#ifndef MLPROV_LEXER_HPP_
#define MLPROV_LEXER_HPP_

#include <string>
#include <vector>

#include "mlprov/literal.hpp"

namespace mlprov::py {

enum class TokKind {
  Name,
  Keyword,
  Number,
  String,
  FString,   // f-prefixed string literal, kept opaque
  Op,        // operators and delimiters, text in `text`
  Newline,
  Indent,
  Dedent,
  EndMarker,
};

struct Token {
  TokKind kind;
  std::string text;
  Literal value;   // decoded value for Number/String
  int line = 0;
  int col = 0;
};

struct LexError {
  std::string message;
  int line = 0;
  int col = 0;
  bool encoding = false;   // true when the input is not valid UTF-8
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<LexError> errors;
  bool ok() const { return errors.empty(); }
};

// Tokenizes Python 3 source. Comments are dropped; indentation is turned
// into Indent/Dedent tokens; lines are joined inside brackets and after
// a trailing backslash.
LexResult tokenize(const std::string &source);

bool is_valid_utf8(const std::string &bytes);

} // namespace mlprov::py

#endif // MLPROV_LEXER_HPP_
