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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qlang/error.hpp"

namespace qlang {

enum class TokKind { kIdent, kNumber, kSymbol, kEnd };

struct Token {
  TokKind kind = TokKind::kEnd;
  std::string text;
  int line = 1;
  int column = 1;

  bool is(std::string_view s) const { return kind != TokKind::kEnd && text == s; }
};

/// Splits source text into identifiers, decimal numbers and symbols.
/// `symbols` lists the multi-character symbols to match greedily; any other
/// punctuation becomes a one-character symbol. "λ" lexes as "\". Comments
/// run from "--" or "#" to the end of the line.
std::vector<Token> tokenize(std::string_view src, const std::vector<std::string>& symbols);

/// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool accept(std::string_view s);
  Token expect(std::string_view s);
  Token expect_ident();
  bool at_end() const { return peek().kind == TokKind::kEnd; }
  std::size_t position() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }
  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg);

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace qlang
