#include "ratopt/parser.hpp"

#include <cctype>
#include <set>

#include <json.hpp>

namespace ratopt {
namespace {

enum class TokKind { Number, Ident, Plus, Minus, Star, Caret, LParen, RParen, End };

struct Token {
    TokKind kind;
    std::string text;
    std::size_t pos;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        std::size_t start = pos_;
        if (pos_ >= src_.size()) {
            tok_ = {TokKind::End, "", start};
            return;
        }
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == '/')) {
                ++pos_;
                if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    throw ParseError("digits expected after '" + std::string(1, src_[pos_ - 1]) + "'", pos_);
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
            tok_ = {TokKind::Number, src_.substr(start, pos_ - start), start};
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            tok_ = {TokKind::Ident, src_.substr(start, pos_ - start), start};
            return;
        }
        ++pos_;
        switch (c) {
            case '+': tok_ = {TokKind::Plus, "+", start}; return;
            case '-': tok_ = {TokKind::Minus, "-", start}; return;
            case '*': tok_ = {TokKind::Star, "*", start}; return;
            case '^': tok_ = {TokKind::Caret, "^", start}; return;
            case '(': tok_ = {TokKind::LParen, "(", start}; return;
            case ')': tok_ = {TokKind::RParen, ")", start}; return;
            default: throw ParseError("unexpected character '" + std::string(1, c) + "'", start);
        }
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    Token tok_{TokKind::End, "", 0};
};

class ExprParser {
  public:
    ExprParser(const std::string& src, const std::vector<std::string>& variables)
        : lex_(src), variables_(variables) {}

    Polynomial parse() {
        Polynomial p = expression();
        if (lex_.peek().kind != TokKind::End)
            throw ParseError("unexpected token '" + lex_.peek().text + "'", lex_.peek().pos);
        return p;
    }

  private:
    int nvars() const { return static_cast<int>(variables_.size()); }

    Polynomial expression() {
        Polynomial acc = term();
        while (true) {
            TokKind k = lex_.peek().kind;
            if (k == TokKind::Plus) {
                lex_.take();
                acc = acc + term();
            } else if (k == TokKind::Minus) {
                lex_.take();
                acc = acc - term();
            } else {
                return acc;
            }
        }
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (lex_.peek().kind == TokKind::Star) {
            lex_.take();
            acc = acc * factor();
        }
        return acc;
    }

    Polynomial factor() {
        bool neg = false;
        while (lex_.peek().kind == TokKind::Plus || lex_.peek().kind == TokKind::Minus) {
            if (lex_.take().kind == TokKind::Minus) neg = !neg;
        }
        Polynomial base = primary();
        if (lex_.peek().kind == TokKind::Caret) {
            lex_.take();
            Token e = lex_.take();
            if (e.kind == TokKind::Minus) throw ParseError("negative exponent", e.pos);
            if (e.kind != TokKind::Number || e.text.find('.') != std::string::npos ||
                e.text.find('/') != std::string::npos)
                throw ParseError("nonnegative integer exponent expected", e.pos);
            base = base.pow(std::stoi(e.text));
        }
        return neg ? -base : base;
    }

    Polynomial primary() {
        Token t = lex_.take();
        switch (t.kind) {
            case TokKind::Number:
                return Polynomial::constant(nvars(), parse_rational(t.text));
            case TokKind::Ident: {
                for (int i = 0; i < nvars(); ++i)
                    if (variables_[i] == t.text) return Polynomial::variable(nvars(), i);
                throw ParseError("unknown identifier '" + t.text + "'", t.pos);
            }
            case TokKind::LParen: {
                Polynomial p = expression();
                Token close = lex_.take();
                if (close.kind != TokKind::RParen) throw ParseError("')' expected", close.pos);
                return p;
            }
            default:
                throw ParseError("operand expected, got '" + t.text + "'", t.pos);
        }
    }

    Lexer lex_;
    const std::vector<std::string>& variables_;
};

using nlohmann::json;

Rational rational_from_json(const json& v) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_float()) throw ParseError("coefficients must be integers or rational strings");
    throw ParseError("malformed coefficient");
}

Polynomial polynomial_from_json(const json& v, const std::vector<std::string>& variables) {
    if (v.is_string()) return parse_polynomial(v.get<std::string>(), variables);
    if (v.is_object() && v.contains("terms")) {
        Polynomial p(static_cast<int>(variables.size()));
        for (const auto& t : v.at("terms")) {
            if (!t.is_array() || t.size() != 2 || !t[1].is_array())
                throw ParseError("term entries must be [coeff, [exponents...]]");
            Exponents e = t[1].get<Exponents>();
            if (e.size() != variables.size()) throw ParseError("term exponent length mismatch");
            for (int k : e)
                if (k < 0) throw ParseError("negative exponent in term list");
            p.add_term(e, rational_from_json(t[0]));
        }
        return p;
    }
    throw ParseError("polynomial must be an expression string or a {\"terms\": ...} object");
}

}  // namespace

Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& variables) {
    return ExprParser(text, variables).parse();
}

RationalProgram parse_problem(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("problem document must be a JSON object");
    if (!doc.contains("variables") || !doc.at("variables").is_array())
        throw ParseError("missing \"variables\" array");
    if (!doc.contains("numerator")) throw ParseError("missing \"numerator\"");

    RationalProgram rp;
    for (const auto& v : doc.at("variables")) {
        if (!v.is_string()) throw ParseError("variable names must be strings");
        rp.variables.push_back(v.get<std::string>());
    }
    if (rp.variables.empty()) throw ParseError("at least one variable is required");
    std::set<std::string> seen(rp.variables.begin(), rp.variables.end());
    if (seen.size() != rp.variables.size()) throw ParseError("duplicate variable names");

    rp.numerator = polynomial_from_json(doc.at("numerator"), rp.variables);
    if (doc.contains("denominator"))
        rp.denominator = polynomial_from_json(doc.at("denominator"), rp.variables);
    else
        rp.denominator = Polynomial::constant(rp.nvars(), 1);
    if (rp.denominator.is_zero()) throw ParseError("denominator is the zero polynomial");

    for (const char* key : {"equalities", "inequalities"}) {
        if (!doc.contains(key)) continue;
        if (!doc.at(key).is_array()) throw ParseError(std::string("\"") + key + "\" must be an array");
        for (const auto& v : doc.at(key)) {
            Polynomial p = polynomial_from_json(v, rp.variables);
            if (std::string(key) == "equalities")
                rp.equalities.push_back(p);
            else
                rp.inequalities.push_back(p);
        }
    }

    static const std::set<std::string> known = {"variables", "numerator", "denominator",
                                               "equalities", "inequalities", "comment", "name"};
    for (const auto& [key, value] : doc.items())
        if (!known.count(key)) throw ParseError("unknown key \"" + key + "\"");
    return rp;
}

}  // namespace ratopt
