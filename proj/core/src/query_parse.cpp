/**
 * MIT License
 * Copyright (c) 2026 The gbd developers
 */

#include "gbd/errors.hpp"
#include "gbd/query.hpp"

#include <cctype>
#include <charconv>

namespace gbd::query {

namespace {

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '/' || c == '-';
}

bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Ast parse() {
        Ast ast;
        skip_ws();
        if (at_end()) {
            ast.root = std::make_unique<Node>();
            return ast;
        }
        ast.root = parse_disj();
        skip_ws();
        if (!at_end()) fail("unexpected trailing input");
        return ast;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError("query syntax error at position " + std::to_string(pos_) + ": " + msg);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!consume(c)) fail(std::string("expected '") + c + "' (" + what + ")");
    }

    // maximal run of word characters
    std::string read_word() {
        size_t start = pos_;
        while (!at_end() && word_char(text_[pos_])) ++pos_;
        if (pos_ == start) fail("expected a value or feature name");
        return text_.substr(start, pos_ - start);
    }

    // peeks the keyword (ci) at the cursor followed by a non-word char
    bool at_keyword(const char* kw) {
        size_t n = std::string_view(kw).size();
        if (pos_ + n > text_.size()) return false;
        if (lower(std::string_view(text_).substr(pos_, n)) != kw) return false;
        return pos_ + n == text_.size() || !word_char(text_[pos_ + n]);
    }

    bool eat_keyword(const char* kw) {
        if (!at_keyword(kw)) return false;
        pos_ += std::string_view(kw).size();
        return true;
    }

    std::string read_name(const char* what) {
        skip_ws();
        size_t start = pos_;
        if (at_end() || !std::isalpha(static_cast<unsigned char>(peek()))) {
            fail(std::string("expected ") + what);
        }
        while (!at_end() && name_char(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    FeatureRef parse_fref() {
        FeatureRef ref;
        ref.name = read_name("a feature name");
        if (consume(':')) {
            ref.source = ref.name;
            ref.name = read_name("a feature name after ':'");
        }
        return ref;
    }

    std::unique_ptr<Node> parse_disj() {
        auto node = parse_conj();
        for (;;) {
            skip_ws();
            if (!eat_keyword("or")) return node;
            auto next = std::make_unique<Node>();
            next->kind = Node::Kind::Or;
            next->lhs = std::move(node);
            next->rhs = parse_conj();
            node = std::move(next);
        }
    }

    std::unique_ptr<Node> parse_conj() {
        auto node = parse_atom();
        for (;;) {
            skip_ws();
            if (!eat_keyword("and")) return node;
            auto next = std::make_unique<Node>();
            next->kind = Node::Kind::And;
            next->lhs = std::move(node);
            next->rhs = parse_atom();
            node = std::move(next);
        }
    }

    std::unique_ptr<Node> parse_atom() {
        skip_ws();
        if (consume('(')) {
            auto node = parse_disj();
            skip_ws();
            expect(')', "closing parenthesis");
            return node;
        }
        auto node = std::make_unique<Node>();
        node->kind = Node::Kind::Constraint;
        node->constraint = parse_constraint();
        return node;
    }

    Cmp parse_cmp() {
        skip_ws();
        if (eat_keyword("like")) return Cmp::Like;
        if (eat_keyword("unlike")) return Cmp::Unlike;
        if (consume('!')) {
            expect('=', "comparison operator");
            return Cmp::Ne;
        }
        if (consume('<')) return consume('=') ? Cmp::Le : Cmp::Lt;
        if (consume('>')) return consume('=') ? Cmp::Ge : Cmp::Gt;
        if (consume('=')) return Cmp::Eq;
        fail("expected a comparison operator");
    }

    Constraint parse_constraint() {
        Constraint c;
        c.ref = parse_fref();
        c.op = parse_cmp();
        skip_ws();
        if (c.op == Cmp::Like || c.op == Cmp::Unlike) {
            c.rhs = parse_pattern();
        } else {
            c.rhs = parse_value();
        }
        return c;
    }

    Rhs parse_pattern() {
        Rhs rhs;
        bool pre = consume('%');
        std::string word = read_word();
        bool post = consume('%');
        if (!at_end() && word_char(peek())) {
            fail("'%' is only allowed at the ends of a pattern");
        }
        if (pre || post) {
            rhs.kind = Rhs::Kind::Pattern;
            rhs.percent_before = pre;
            rhs.percent_after = post;
        }
        rhs.text = std::move(word);
        return rhs;
    }

    Rhs parse_value() {
        Rhs rhs;
        if (peek() == '%') {
            fail("'%' is only valid after like/unlike");
        }
        if (peek() == '(') {
            rhs.kind = Rhs::Kind::Term;
            rhs.term = std::make_unique<Term>(parse_term());
            return rhs;
        }
        std::string word = read_word();
        if (peek() == '%') fail("'%' is only valid after like/unlike");
        double value = 0.0;
        auto [p, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
        if (ec == std::errc() && p == word.data() + word.size()) {
            rhs.kind = Rhs::Kind::Term;
            rhs.term = std::make_unique<Term>();
            rhs.term->kind = Term::Kind::Number;
            rhs.term->number_text = word;
            rhs.term->number_value = value;
        } else {
            rhs.text = std::move(word);
        }
        return rhs;
    }

    // number token inside terms: longest valid numeric prefix
    Term parse_number() {
        double value = 0.0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        auto [p, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || p == begin) fail("expected a number");
        Term t;
        t.kind = Term::Kind::Number;
        t.number_text = std::string(begin, p);
        t.number_value = value;
        pos_ += static_cast<size_t>(p - begin);
        return t;
    }

    Term parse_term() {
        skip_ws();
        if (!consume('(')) return parse_number();
        skip_ws();
        if (std::isalpha(static_cast<unsigned char>(peek()))) {
            Term t;
            t.kind = Term::Kind::Feature;
            t.ref = parse_fref();
            skip_ws();
            expect(')', "closing parenthesis of feature term");
            return t;
        }
        Term t;
        t.kind = Term::Kind::Binary;
        t.lhs = std::make_unique<Term>(parse_term());
        skip_ws();
        switch (peek()) {
        case '+': t.op = ArithOp::Add; break;
        case '-': t.op = ArithOp::Sub; break;
        case '*': t.op = ArithOp::Mul; break;
        case '/': t.op = ArithOp::Div; break;
        default: fail("expected an arithmetic operator");
        }
        ++pos_;
        t.rhs = std::make_unique<Term>(parse_term());
        skip_ws();
        expect(')', "closing parenthesis of term");
        return t;
    }

    const std::string& text_;
    size_t pos_ = 0;
};

const char* cmp_text(Cmp op) {
    switch (op) {
    case Cmp::Eq: return "=";
    case Cmp::Ne: return "!=";
    case Cmp::Lt: return "<";
    case Cmp::Gt: return ">";
    case Cmp::Le: return "<=";
    case Cmp::Ge: return ">=";
    case Cmp::Like: return "like";
    case Cmp::Unlike: return "unlike";
    }
    return "?";
}

char arith_text(ArithOp op) {
    switch (op) {
    case ArithOp::Add: return '+';
    case ArithOp::Sub: return '-';
    case ArithOp::Mul: return '*';
    case ArithOp::Div: return '/';
    }
    return '?';
}

std::string pretty_term(const Term& t) {
    switch (t.kind) {
    case Term::Kind::Number: return t.number_text;
    case Term::Kind::Feature: return "(" + t.ref.display() + ")";
    case Term::Kind::Binary:
        return "(" + pretty_term(*t.lhs) + " " + arith_text(t.op) + " " + pretty_term(*t.rhs) + ")";
    }
    return "";
}

std::string pretty_node(const Node& node) {
    switch (node.kind) {
    case Node::Kind::MatchAll:
        return "";
    case Node::Kind::Or:
        return pretty_node(*node.lhs) + " or " + pretty_node(*node.rhs);
    case Node::Kind::And: {
        auto wrap = [](const Node& child) {
            std::string s = pretty_node(child);
            return child.kind == Node::Kind::Or ? "(" + s + ")" : s;
        };
        return wrap(*node.lhs) + " and " + wrap(*node.rhs);
    }
    case Node::Kind::Constraint: {
        const Constraint& c = node.constraint;
        std::string rhs;
        switch (c.rhs.kind) {
        case Rhs::Kind::Text:
            rhs = c.rhs.text;
            break;
        case Rhs::Kind::Pattern:
            rhs = (c.rhs.percent_before ? "%" : "") + c.rhs.text + (c.rhs.percent_after ? "%" : "");
            break;
        case Rhs::Kind::Term:
            rhs = pretty_term(*c.rhs.term);
            break;
        }
        return c.ref.display() + " " + cmp_text(c.op) + " " + rhs;
    }
    }
    return "";
}

} // namespace

FeatureRef parse_feature_ref(const std::string& text) {
    FeatureRef ref;
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        ref.name = text;
    } else {
        ref.source = text.substr(0, colon);
        ref.name = text.substr(colon + 1);
    }
    if (!is_legal_feature_name(ref.name) && ref.name != "hash") {
        throw SyntaxError("illegal feature reference '" + text + "'");
    }
    if (ref.source && !is_legal_feature_name(*ref.source)) {
        throw SyntaxError("illegal source name in reference '" + text + "'");
    }
    return ref;
}

Ast parse_query(const std::string& text) {
    return Parser(text).parse();
}

std::string pretty(const Ast& ast) {
    return ast.root ? pretty_node(*ast.root) : "";
}

Collapse collapse_from_string(const std::string& name) {
    if (name == "none") return Collapse::None;
    if (name == "min") return Collapse::Min;
    if (name == "max") return Collapse::Max;
    if (name == "avg") return Collapse::Avg;
    if (name == "count") return Collapse::Count;
    throw SyntaxError("unknown collapse function '" + name + "' (none|min|max|avg|count)");
}

} // namespace gbd::query
