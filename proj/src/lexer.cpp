#include "numalang/lexer.hpp"

#include <cctype>
#include <map>

namespace numalang::syntax {

const char* token_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::KwActive: return "'active'";
    case Tok::KwClass: return "'class'";
    case Tok::KwDef: return "'def'";
    case Tok::KwAs: return "'as'";
    case Tok::KwLet: return "'let'";
    case Tok::KwIn: return "'in'";
    case Tok::KwIf: return "'if'";
    case Tok::KwThen: return "'then'";
    case Tok::KwElse: return "'else'";
    case Tok::KwFor: return "'for'";
    case Tok::KwNew: return "'new'";
    case Tok::KwThis: return "'this'";
    case Tok::KwNull: return "'null'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::KwSkip: return "'skip'";
    case Tok::KwBool: return "'bool'";
    case Tok::KwNil: return "'nil'";
    case Tok::KwEps: return "'eps'";
    case Tok::KwRead: return "'read'";
    case Tok::KwWrite: return "'write'";
    case Tok::KwMsg: return "'msg'";
    case Tok::KwReturn: return "'return'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::DotDot: return "'..'";
    case Tok::Assign: return "'='";
    case Tok::Bang: return "'!'";
    case Tok::Plus: return "'+'";
    case Tok::Star: return "'*'";
    case Tok::PipePipe: return "'||'";
    case Tok::At: return "'@'";
    case Tok::End: return "end of input";
    case Tok::Invalid: return "invalid token";
  }
  return "?";
}

namespace {

const std::map<std::string_view, Tok>& keywords() {
  static const std::map<std::string_view, Tok> kw = {
      {"active", Tok::KwActive}, {"class", Tok::KwClass}, {"def", Tok::KwDef},
      {"as", Tok::KwAs},         {"let", Tok::KwLet},     {"in", Tok::KwIn},
      {"if", Tok::KwIf},         {"then", Tok::KwThen},   {"else", Tok::KwElse},
      {"for", Tok::KwFor},       {"new", Tok::KwNew},     {"this", Tok::KwThis},
      {"null", Tok::KwNull},     {"true", Tok::KwTrue},   {"false", Tok::KwFalse},
      {"skip", Tok::KwSkip},     {"bool", Tok::KwBool},   {"nil", Tok::KwNil},
      {"eps", Tok::KwEps},       {"read", Tok::KwRead},   {"write", Tok::KwWrite},
      {"msg", Tok::KwMsg},       {"return", Tok::KwReturn},
  };
  return kw;
}

}  // namespace

std::vector<Token> lex(std::string_view src, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto push = [&](Tok k, Span sp, std::string text = {}, int value = 0) {
    out.push_back(Token{k, std::move(text), value, sp});
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Span sp{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        advance(1);
      std::string_view word = src.substr(start, i - start);
      auto it = keywords().find(word);
      if (it != keywords().end())
        push(it->second, sp, std::string(word));
      else
        push(Tok::Ident, sp, std::string(word));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance(1);
      std::string text(src.substr(start, i - start));
      int value = 0;
      try {
        value = std::stoi(text);
      } catch (...) {
        diags.push_back({Severity::Error, sp, "integer literal out of range", {}});
      }
      push(Tok::Int, sp, text, value);
      continue;
    }
    switch (c) {
      case '(': push(Tok::LParen, sp); advance(1); continue;
      case ')': push(Tok::RParen, sp); advance(1); continue;
      case '{': push(Tok::LBrace, sp); advance(1); continue;
      case '}': push(Tok::RBrace, sp); advance(1); continue;
      case '<': push(Tok::Lt, sp); advance(1); continue;
      case '>': push(Tok::Gt, sp); advance(1); continue;
      case ',': push(Tok::Comma, sp); advance(1); continue;
      case ':': push(Tok::Colon, sp); advance(1); continue;
      case '=': push(Tok::Assign, sp); advance(1); continue;
      case '!': push(Tok::Bang, sp); advance(1); continue;
      case '+': push(Tok::Plus, sp); advance(1); continue;
      case '*': push(Tok::Star, sp); advance(1); continue;
      case '@': push(Tok::At, sp); advance(1); continue;
      case '.':
        if (i + 1 < src.size() && src[i + 1] == '.') {
          push(Tok::DotDot, sp);
          advance(2);
        } else {
          push(Tok::Dot, sp);
          advance(1);
        }
        continue;
      case '|':
        if (i + 1 < src.size() && src[i + 1] == '|') {
          push(Tok::PipePipe, sp);
          advance(2);
          continue;
        }
        break;
      default:
        break;
    }
    diags.push_back({Severity::Error, sp,
                     std::string("unexpected character '") + c + "'", {}});
    push(Tok::Invalid, sp, std::string(1, c));
    advance(1);
  }
  out.push_back(Token{Tok::End, {}, 0, Span{line, col}});
  return out;
}

}  // namespace numalang::syntax
