#pragma once

// Tokenizer shared by the query, fact, dependency and certificate readers.

#include "cqapprox/model.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace cqa::detail {

enum class Tok { Ident, LParen, RParen, Comma, Period, Implies, Arrow, Equals, Minus, End };

struct Token
{
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer
{
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token & peek() const { return current_; }

    Token next()
    {
        Token t = current_;
        advance();
        return t;
    }

    bool accept(Tok kind)
    {
        if (current_.kind != kind)
            return false;
        advance();
        return true;
    }

    Token expect(Tok kind, const char * what)
    {
        if (current_.kind != kind)
            fail(std::string("expected ") + what + ", found " + describe(current_));
        return next();
    }

    [[noreturn]] void fail(const std::string & message) const
    {
        throw ParseError(message, current_.line, current_.column);
    }

    static std::string describe(const Token & t)
    {
        switch (t.kind) {
        case Tok::Ident: return "'" + t.text + "'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::Period: return "'.'";
        case Tok::Implies: return "':-'";
        case Tok::Arrow: return "'->'";
        case Tok::Equals: return "'='";
        case Tok::Minus: return "'-'";
        case Tok::End: return "end of input";
        }
        return "?";
    }

private:
    static bool ident_char(char c)
    {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    }

    char at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

    void bump()
    {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        }
        else
            ++column_;
        ++pos_;
    }

    void advance()
    {
        for (;;) {
            while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r' || text_[pos_] == '\n'))
                bump();
            if (pos_ < text_.size() && text_[pos_] == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    bump();
                continue;
            }
            break;
        }
        current_ = Token{};
        current_.line = line_;
        current_.column = column_;
        if (pos_ >= text_.size()) {
            current_.kind = Tok::End;
            return;
        }
        char c = text_[pos_];
        if (ident_char(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && ident_char(text_[pos_]))
                bump();
            current_.kind = Tok::Ident;
            current_.text = std::string(text_.substr(start, pos_ - start));
            return;
        }
        auto single = [&](Tok kind) {
            current_.kind = kind;
            current_.text = std::string(1, c);
            bump();
        };
        switch (c) {
        case '(': single(Tok::LParen); return;
        case ')': single(Tok::RParen); return;
        case ',': single(Tok::Comma); return;
        case '.': single(Tok::Period); return;
        case '=': single(Tok::Equals); return;
        case ':':
            if (at(pos_ + 1) == '-') {
                current_.kind = Tok::Implies;
                current_.text = ":-";
                bump();
                bump();
                return;
            }
            break;
        case '-':
            if (at(pos_ + 1) == '>') {
                current_.kind = Tok::Arrow;
                current_.text = "->";
                bump();
                bump();
                return;
            }
            single(Tok::Minus);
            return;
        default: break;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
    Token current_;
};

inline bool is_variable_name(const std::string & s)
{
    return !s.empty() && ((s[0] >= 'a' && s[0] <= 'z') || s[0] == '_');
}

inline bool is_relation_name(const std::string & s)
{
    return !s.empty() && ((s[0] >= 'a' && s[0] <= 'z') || (s[0] >= 'A' && s[0] <= 'Z'));
}

/// Parses `R(t1,...,tk)` where the relation token has already been peeked.
/// When `variables_only` is set, every argument must be a variable name.
inline Atom parse_atom(Lexer & lex, bool variables_only)
{
    Token rel = lex.expect(Tok::Ident, "relation name");
    if (!is_relation_name(rel.text))
        throw ParseError("invalid relation name '" + rel.text + "'", rel.line, rel.column);
    Atom atom;
    atom.relation = rel.text;
    lex.expect(Tok::LParen, "'('");
    if (!lex.accept(Tok::RParen)) {
        for (;;) {
            Token arg = lex.expect(Tok::Ident, "term");
            if (variables_only && !is_variable_name(arg.text))
                throw ParseError("constant '" + arg.text + "' is not allowed in a query body; variables start with a lowercase letter or '_'",
                                 arg.line, arg.column);
            atom.args.push_back(arg.text);
            if (lex.accept(Tok::RParen))
                break;
            lex.expect(Tok::Comma, "',' or ')'");
        }
    }
    return atom;
}

} // namespace cqa::detail
