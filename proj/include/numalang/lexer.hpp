#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "numalang/diag.hpp"

namespace numalang::syntax {

enum class Tok {
  Ident, Int,
  KwActive, KwClass, KwDef, KwAs, KwLet, KwIn, KwIf, KwThen, KwElse, KwFor,
  KwNew, KwThis, KwNull, KwTrue, KwFalse, KwSkip, KwBool, KwNil,
  KwEps, KwRead, KwWrite, KwMsg, KwReturn,
  LParen, RParen, LBrace, RBrace, Lt, Gt, Comma, Colon, Dot, DotDot,
  Assign, Bang, Plus, Star, PipePipe, At,
  End, Invalid
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int value = 0;  // Int
  Span span;
};

const char* token_name(Tok t);

/// Tokenizes the whole input. Always ends with an End token; malformed
/// characters produce Invalid tokens plus a diagnostic.
std::vector<Token> lex(std::string_view source, std::vector<Diagnostic>& diags);

}  // namespace numalang::syntax
