#include "mlprov/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <set>
#include <string_view>

namespace mlprov::py {

namespace {

const std::set<std::string> kKeywords = {
    "False",  "None",   "True",    "and",    "as",     "assert", "async",
    "await",  "break",  "class",   "continue", "def",  "del",    "elif",
    "else",   "except", "finally", "for",    "from",   "global", "if",
    "import", "in",     "is",      "lambda", "nonlocal", "not",  "or",
    "pass",   "raise",  "return",  "try",    "while",  "with",   "yield"};

// Multi-character operators, longest first so greedy matching works.
const std::array<std::string_view, 26> kOps3 = {
    "**=", "//=", ">>=", "<<=", "...", "!=",  "==",  ">=",  "<=",
    "->",  ":=",  "+=",  "-=",  "*=",  "/=",  "%=",  "&=",  "|=",
    "^=",  "**",  "//",  ">>",  "<<",  "@=",  "@",   ""};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_cont(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

} // namespace

bool is_valid_utf8(const std::string &bytes) {
  std::size_t i = 0;
  const auto n = bytes.size();
  while (i < n) {
    unsigned char c = bytes[i];
    std::size_t extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c >> 5) == 0x6) {
      extra = 1;
    } else if ((c >> 4) == 0xE) {
      extra = 2;
    } else if ((c >> 3) == 0x1E) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= n) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(bytes[i + k]) >> 6) != 0x2) return false;
    }
    i += extra + 1;
  }
  return true;
}

namespace {

class Lexer {
public:
  explicit Lexer(const std::string &src) : src_(src) {}

  LexResult run() {
    if (!is_valid_utf8(src_)) {
      error("source is not valid UTF-8", 1, 1, /*encoding=*/true);
      return std::move(result_);
    }
    indents_.push_back(0);
    at_line_start_ = true;
    while (pos_ <= src_.size()) {
      if (pos_ == src_.size()) {
        finish();
        break;
      }
      if (at_line_start_ && bracket_depth_ == 0) {
        if (!handle_indentation()) break;
        if (pos_ >= src_.size()) {
          finish();
          break;
        }
      }
      char c = src_[pos_];
      if (c == '\n') {
        consume_newline();
        continue;
      }
      if (c == '\r') {
        ++pos_;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\f') {
        ++pos_;
        ++col_;
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '\\' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == '\n' || src_[pos_ + 1] == '\r')) {
        pos_ += (src_[pos_ + 1] == '\r' && pos_ + 2 < src_.size() && src_[pos_ + 2] == '\n') ? 3 : 2;
        ++line_;
        col_ = 1;
        continue;
      }
      if (is_ident_start(c)) {
        lex_name_or_string_prefix();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) ||
          (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number();
        continue;
      }
      if (c == '\'' || c == '"') {
        lex_string("");
        continue;
      }
      lex_operator();
      if (!result_.errors.empty()) break;
    }
    return std::move(result_);
  }

private:
  void push(TokKind k, std::string text, Literal v, int line, int col) {
    result_.tokens.push_back(Token{k, std::move(text), std::move(v), line, col});
  }

  void error(const std::string &msg, int line, int col, bool encoding = false) {
    result_.errors.push_back(LexError{msg, line, col, encoding});
  }

  // Emits Newline unless the logical line was blank.
  void consume_newline() {
    ++pos_;
    if (bracket_depth_ == 0) {
      if (line_had_tokens_) push(TokKind::Newline, "\n", NoneLit{}, line_, col_);
      line_had_tokens_ = false;
      at_line_start_ = true;
    }
    ++line_;
    col_ = 1;
  }

  bool handle_indentation() {
    int width = 0;
    std::size_t p = pos_;
    while (p < src_.size()) {
      char c = src_[p];
      if (c == ' ') {
        ++width;
      } else if (c == '\t') {
        width = (width / 8 + 1) * 8;
      } else {
        break;
      }
      ++p;
    }
    // Blank or comment-only lines do not affect indentation.
    if (p >= src_.size() || src_[p] == '\n' || src_[p] == '\r' || src_[p] == '#') {
      pos_ = p;
      col_ = width + 1;
      at_line_start_ = false;
      return true;
    }
    pos_ = p;
    col_ = width + 1;
    at_line_start_ = false;
    if (width > indents_.back()) {
      indents_.push_back(width);
      push(TokKind::Indent, "", NoneLit{}, line_, 1);
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        push(TokKind::Dedent, "", NoneLit{}, line_, 1);
      }
      if (width != indents_.back()) {
        error("unindent does not match any outer indentation level", line_, col_);
        return false;
      }
    }
    line_had_tokens_ = true;
    return true;
  }

  void finish() {
    if (line_had_tokens_) push(TokKind::Newline, "\n", NoneLit{}, line_, col_);
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(TokKind::Dedent, "", NoneLit{}, line_, 1);
    }
    push(TokKind::EndMarker, "", NoneLit{}, line_, col_);
  }

  void lex_name_or_string_prefix() {
    int line = line_, col = col_;
    std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_cont(src_[pos_])) {
      ++pos_;
      ++col_;
    }
    std::string word = src_.substr(start, pos_ - start);
    // String prefixes: r, b, u, f and their combinations.
    if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') && word.size() <= 2) {
      std::string lower;
      for (char ch : word) lower.push_back(static_cast<char>(std::tolower(ch)));
      bool is_prefix = !lower.empty() && lower.find_first_not_of("rbuf") == std::string::npos;
      if (is_prefix) {
        lex_string(lower);
        return;
      }
    }
    line_had_tokens_ = true;
    if (kKeywords.count(word)) {
      push(TokKind::Keyword, word, NoneLit{}, line, col);
    } else {
      push(TokKind::Name, word, word, line, col);
    }
  }

  void lex_number() {
    int line = line_, col = col_;
    std::size_t start = pos_;
    bool is_float = false;
    if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
        (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X' || src_[pos_ + 1] == 'o' ||
         src_[pos_ + 1] == 'O' || src_[pos_ + 1] == 'b' || src_[pos_ + 1] == 'B')) {
      pos_ += 2;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
    } else {
      auto digits = [&] {
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          ++pos_;
      };
      digits();
      if (pos_ < src_.size() && src_[pos_] == '.') {
        is_float = true;
        ++pos_;
        digits();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_;
        ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          is_float = true;
          digits();
        } else {
          pos_ = save;
        }
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) {
        is_float = true;
        ++pos_;
      }
    }
    std::string text = src_.substr(start, pos_ - start);
    std::string clean;
    for (char ch : text)
      if (ch != '_') clean.push_back(ch);
    col_ += static_cast<int>(text.size());
    line_had_tokens_ = true;
    Literal v;
    if (is_float) {
      v = std::strtod(clean.c_str(), nullptr);
    } else {
      v = static_cast<std::int64_t>(std::strtoll(clean.c_str(), nullptr, 0));
    }
    push(TokKind::Number, text, v, line, col);
  }

  void lex_string(const std::string &prefix) {
    int line = line_, col = col_;
    char quote = src_[pos_];
    bool raw = prefix.find('r') != std::string::npos;
    bool fstr = prefix.find('f') != std::string::npos;
    bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote;
    pos_ += triple ? 3 : 1;
    std::string value;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\\' && !raw && pos_ + 1 < src_.size()) {
        char esc = src_[pos_ + 1];
        switch (esc) {
          case 'n': value.push_back('\n'); break;
          case 't': value.push_back('\t'); break;
          case 'r': value.push_back('\r'); break;
          case '\\': value.push_back('\\'); break;
          case '\'': value.push_back('\''); break;
          case '"': value.push_back('"'); break;
          case '\n': ++line_; break;
          default: value.push_back('\\'); value.push_back(esc); break;
        }
        pos_ += 2;
        continue;
      }
      if (c == '\\' && raw && pos_ + 1 < src_.size()) {
        value.push_back(c);
        value.push_back(src_[pos_ + 1]);
        pos_ += 2;
        continue;
      }
      if (c == '\n') {
        if (!triple) {
          error("EOL while scanning string literal", line, col);
          return;
        }
        value.push_back(c);
        ++line_;
        col_ = 1;
        ++pos_;
        continue;
      }
      if (c == quote) {
        if (!triple) {
          ++pos_;
          ++col_;
          goto done;
        }
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote) {
          pos_ += 3;
          col_ += 3;
          goto done;
        }
      }
      value.push_back(c);
      ++pos_;
      ++col_;
    }
    error("unterminated string literal", line, col);
    return;
  done:
    line_had_tokens_ = true;
    push(fstr ? TokKind::FString : TokKind::String, value, value, line, col);
  }

  void lex_operator() {
    int line = line_, col = col_;
    for (const auto &op : kOps3) {
      if (op.empty()) break;
      if (src_.compare(pos_, op.size(), op) == 0) {
        pos_ += op.size();
        col_ += static_cast<int>(op.size());
        line_had_tokens_ = true;
        push(TokKind::Op, std::string(op), NoneLit{}, line, col);
        return;
      }
    }
    char c = src_[pos_];
    static const std::string singles = "+-*/%<>=&|^~()[]{},:.;@";
    if (singles.find(c) != std::string::npos) {
      if (c == '(' || c == '[' || c == '{') ++bracket_depth_;
      if (c == ')' || c == ']' || c == '}') bracket_depth_ = std::max(0, bracket_depth_ - 1);
      ++pos_;
      ++col_;
      line_had_tokens_ = true;
      push(TokKind::Op, std::string(1, c), NoneLit{}, line, col);
      return;
    }
    error(std::string("invalid character '") + c + "'", line, col);
  }

  const std::string &src_;
  LexResult result_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int bracket_depth_ = 0;
  bool at_line_start_ = false;
  bool line_had_tokens_ = false;
  std::vector<int> indents_;
};

} // namespace

LexResult tokenize(const std::string &source) { return Lexer(source).run(); }

} // namespace mlprov::py
