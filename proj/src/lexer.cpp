// Copyright 2026 The qlang Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qlang/lexer.hpp"

#include <algorithm>
#include <cctype>

namespace qlang {

std::vector<Token> tokenize(std::string_view src, const std::vector<std::string>& symbols) {
  std::vector<std::string> syms = symbols;
  std::sort(syms.begin(), syms.end(),
            [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };
  auto ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || src.substr(i, 2) == "--") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = TokKind::kIdent;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.kind = TokKind::kNumber;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (src.substr(i, 2) == "\xCE\xBB") {  // λ
      t.kind = TokKind::kSymbol;
      t.text = "\\";
      advance(2);
    } else {
      t.kind = TokKind::kSymbol;
      std::size_t len = 0;
      for (const auto& s : syms) {
        if (src.substr(i, s.size()) == s) {
          len = s.size();
          break;
        }
      }
      if (len == 0) {
        len = 1;
        // Keep multi-byte UTF-8 characters whole.
        while (i + len < src.size() && (static_cast<unsigned char>(src[i + len]) & 0xC0) == 0x80) ++len;
      }
      t.text = std::string(src.substr(i, len));
      advance(len);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
}

Token TokenStream::next() {
  Token t = peek();
  if (pos_ + 1 < toks_.size()) ++pos_;
  return t;
}

bool TokenStream::accept(std::string_view s) {
  if (peek().is(s)) {
    next();
    return true;
  }
  return false;
}

Token TokenStream::expect(std::string_view s) {
  if (!peek().is(s)) fail("expected '" + std::string(s) + "'");
  return next();
}

Token TokenStream::expect_ident() {
  if (peek().kind != TokKind::kIdent) fail("expected an identifier");
  return next();
}

void TokenStream::fail(const std::string& msg) const { fail_at(peek(), msg); }

void TokenStream::fail_at(const Token& t, const std::string& msg) {
  const std::string found = t.kind == TokKind::kEnd ? "end of input" : "'" + t.text + "'";
  throw SyntaxError(msg + " (found " + found + ")", t.line, t.column);
}

}  // namespace qlang
