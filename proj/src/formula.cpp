#include <surveynet/formula.hpp>

#include <algorithm>
#include <cctype>

namespace surveynet {

std::string_view to_string(Function fn) {
    switch (fn) {
    case Function::Sum: return "sum";
    case Function::Mean: return "mean";
    case Function::Min: return "min";
    case Function::Max: return "max";
    case Function::CountAnswered: return "count_answered";
    }
    return "sum";
}

std::optional<Function> function_from_name(std::string_view name) {
    for (auto fn : {Function::Sum, Function::Mean, Function::Min, Function::Max, Function::CountAnswered})
        if (to_string(fn) == name)
            return fn;
    return std::nullopt;
}

bool same_tree(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index())
        return false;
    return std::visit(
        [&](const auto& lhs) -> bool {
            using T = std::decay_t<decltype(lhs)>;
            const auto& rhs = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, Expr::Number>)
                return lhs.value == rhs.value;
            else if constexpr (std::is_same_v<T, Expr::Ref>)
                return lhs.id == rhs.id;
            else if constexpr (std::is_same_v<T, Expr::Binary>)
                return lhs.op == rhs.op && same_tree(*lhs.lhs, *rhs.lhs) && same_tree(*lhs.rhs, *rhs.rhs);
            else
                return lhs.fn == rhs.fn && lhs.refs == rhs.refs;
        },
        a.node);
}

namespace {

void collect_refs(const Expr& expr, std::vector<std::string>& out) {
    auto add = [&](const std::string& id) {
        if (std::find(out.begin(), out.end(), id) == out.end())
            out.push_back(id);
    };
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Ref>) {
                add(node.id);
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                collect_refs(*node.lhs, out);
                collect_refs(*node.rhs, out);
            } else if constexpr (std::is_same_v<T, Expr::Call>) {
                for (const auto& id : node.refs)
                    add(id);
            }
        },
        expr.node);
}

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
public:
    Parser(std::string_view source, const std::set<std::string>* scoreable,
           const std::set<std::string>* free_text)
        : src_(source), scoreable_(scoreable), free_text_(free_text) {}

    ExprPtr parse() {
        auto expr = parse_expr();
        skip_space();
        if (pos_ < src_.size())
            fail(ErrorCode::SyntaxError, "unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        return expr;
    }

private:
    [[noreturn]] void fail(ErrorCode code, const std::string& what, std::size_t at) const {
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw FormulaError(code,
                           what + " at line " + std::to_string(line) + ", column " + std::to_string(column),
                           at, line, column);
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            std::string found = pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'" : "end of input";
            fail(ErrorCode::SyntaxError, "expected '" + std::string(1, c) + "' but found " + found, pos_);
        }
    }

    ExprPtr parse_expr() {
        auto lhs = parse_term();
        for (;;) {
            skip_space();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                char op = src_[pos_++];
                auto rhs = parse_term();
                lhs = std::make_shared<const Expr>(Expr{Expr::Binary{op, lhs, rhs}, lhs->offset});
            } else {
                return lhs;
            }
        }
    }

    ExprPtr parse_term() {
        auto lhs = parse_factor();
        for (;;) {
            skip_space();
            if (pos_ < src_.size() && (src_[pos_] == '*' || src_[pos_] == '/')) {
                char op = src_[pos_++];
                auto rhs = parse_factor();
                lhs = std::make_shared<const Expr>(Expr{Expr::Binary{op, lhs, rhs}, lhs->offset});
            } else {
                return lhs;
            }
        }
    }

    std::string parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_]))
            ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }

    void check_ref(const std::string& id, std::size_t at) const {
        if (free_text_ != nullptr && free_text_->count(id) != 0)
            fail(ErrorCode::FreeTextReference, "free-text item '" + id + "' cannot be scored", at);
        if (scoreable_ != nullptr && scoreable_->count(id) == 0)
            fail(ErrorCode::UnknownItem, "unknown item '" + id + "'", at);
    }

    ExprPtr parse_factor() {
        skip_space();
        if (pos_ >= src_.size())
            fail(ErrorCode::SyntaxError, "unexpected end of input", pos_);
        const std::size_t start = pos_;
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            auto inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return parse_number();
        if (is_ident_start(c)) {
            std::string name = parse_ident();
            skip_space();
            if (pos_ < src_.size() && src_[pos_] == '(') {
                auto fn = function_from_name(name);
                if (!fn)
                    fail(ErrorCode::UnknownFunction, "unknown function '" + name + "'", start);
                ++pos_;
                auto refs = parse_ref_list();
                expect(')');
                return std::make_shared<const Expr>(Expr{Expr::Call{*fn, std::move(refs)}, start});
            }
            check_ref(name, start);
            return std::make_shared<const Expr>(Expr{Expr::Ref{std::move(name)}, start});
        }
        fail(ErrorCode::SyntaxError, "unexpected '" + std::string(1, c) + "'", pos_);
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        if (pos_ < src_.size() && (is_ident_start(src_[pos_]) || src_[pos_] == '.'))
            fail(ErrorCode::SyntaxError, "malformed number", start);
        return std::make_shared<const Expr>(
            Expr{Expr::Number{parse_rational(src_.substr(start, pos_ - start))}, start});
    }

    static std::pair<std::string, std::optional<long>> split_numeric_suffix(const std::string& id) {
        std::size_t cut = id.size();
        while (cut > 0 && std::isdigit(static_cast<unsigned char>(id[cut - 1])))
            --cut;
        if (cut == id.size() || id.size() - cut > 9)
            return {id, std::nullopt};
        return {id.substr(0, cut), std::stol(id.substr(cut))};
    }

    std::vector<std::string> parse_ref_list() {
        std::vector<std::string> refs;
        do {
            skip_space();
            const std::size_t start = pos_;
            if (pos_ >= src_.size() || !is_ident_start(src_[pos_]))
                fail(ErrorCode::SyntaxError, "expected item reference", pos_);
            std::string first = parse_ident();
            skip_space();
            if (src_.substr(pos_, 2) == "..") {
                pos_ += 2;
                skip_space();
                const std::size_t last_at = pos_;
                if (pos_ >= src_.size() || !is_ident_start(src_[pos_]))
                    fail(ErrorCode::SyntaxError, "expected item reference after '..'", pos_);
                std::string last = parse_ident();
                auto [prefix_a, lo] = split_numeric_suffix(first);
                auto [prefix_b, hi] = split_numeric_suffix(last);
                if (!lo || !hi || prefix_a != prefix_b || *lo > *hi)
                    fail(ErrorCode::SyntaxError, "invalid range '" + first + ".." + last + "'", start);
                for (long i = *lo; i <= *hi; ++i) {
                    std::string id = prefix_a + std::to_string(i);
                    check_ref(id, i == *hi ? last_at : start);
                    refs.push_back(std::move(id));
                }
            } else {
                check_ref(first, start);
                refs.push_back(std::move(first));
            }
        } while (accept(','));
        return refs;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    const std::set<std::string>* scoreable_;
    const std::set<std::string>* free_text_;
};

int precedence(char op) {
    return (op == '+' || op == '-') ? 1 : 2;
}

void unparse_into(const Expr& expr, std::string& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Number>) {
                // literals are finite decimals, so a wide digit budget renders them exactly
                out += to_decimal(node.value, 40);
            } else if constexpr (std::is_same_v<T, Expr::Ref>) {
                out += node.id;
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                const int prec = precedence(node.op);
                auto child = [&](const Expr& sub, bool right) {
                    const auto* bin = std::get_if<Expr::Binary>(&sub.node);
                    const bool wrap = bin != nullptr &&
                                      (precedence(bin->op) < prec || (right && precedence(bin->op) == prec));
                    if (wrap)
                        out += '(';
                    unparse_into(sub, out);
                    if (wrap)
                        out += ')';
                };
                child(*node.lhs, false);
                out += ' ';
                out += node.op;
                out += ' ';
                child(*node.rhs, true);
            } else {
                out += to_string(node.fn);
                out += '(';
                for (std::size_t i = 0; i < node.refs.size(); ++i) {
                    if (i != 0)
                        out += ", ";
                    out += node.refs[i];
                }
                out += ')';
            }
        },
        expr.node);
}

Rational lookup(const AnswerMap& answers, const std::string& id) {
    auto it = answers.find(id);
    if (it == answers.end())
        throw MissingAnswerError(id);
    return it->second;
}

Rational evaluate_call(const Expr::Call& call, const AnswerMap& answers) {
    switch (call.fn) {
    case Function::Sum: {
        Rational total;
        for (const auto& id : call.refs)
            total += lookup(answers, id);
        return total;
    }
    case Function::Min:
    case Function::Max: {
        Rational best = lookup(answers, call.refs.front());
        for (std::size_t i = 1; i < call.refs.size(); ++i) {
            Rational v = lookup(answers, call.refs[i]);
            if (call.fn == Function::Min ? v < best : v > best)
                best = v;
        }
        return best;
    }
    case Function::Mean: {
        Rational total;
        long answered = 0;
        for (const auto& id : call.refs) {
            if (auto it = answers.find(id); it != answers.end()) {
                total += it->second;
                ++answered;
            }
        }
        if (answered == 0)
            throw MissingAnswerError(call.refs.front());
        return total / Rational(answered);
    }
    case Function::CountAnswered: {
        long answered = 0;
        for (const auto& id : call.refs)
            answered += answers.count(id) != 0 ? 1 : 0;
        return Rational(answered);
    }
    }
    return Rational(0);
}

ValueRange hull(std::initializer_list<Rational> values) {
    ValueRange r{*values.begin(), *values.begin()};
    for (const auto& v : values) {
        r.lower = std::min(r.lower, v);
        r.upper = std::max(r.upper, v);
    }
    return r;
}

} // namespace

std::vector<std::string> Formula::references() const {
    std::vector<std::string> out;
    if (root)
        collect_refs(*root, out);
    return out;
}

Formula parse_formula(std::string_view source) {
    Parser parser(source, nullptr, nullptr);
    return Formula{std::string(source), parser.parse()};
}

Formula parse_formula(std::string_view source, const std::set<std::string>& scoreable,
                      const std::set<std::string>& free_text) {
    Parser parser(source, &scoreable, &free_text);
    return Formula{std::string(source), parser.parse()};
}

std::string unparse(const Expr& expr) {
    std::string out;
    unparse_into(expr, out);
    return out;
}

Rational evaluate(const Formula& formula, const AnswerMap& answers) {
    return evaluate(*formula.root, answers);
}

Rational evaluate(const Expr& expr, const AnswerMap& answers) {
    return std::visit(
        [&](const auto& node) -> Rational {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Number>) {
                return node.value;
            } else if constexpr (std::is_same_v<T, Expr::Ref>) {
                return lookup(answers, node.id);
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                Rational lhs = evaluate(*node.lhs, answers);
                Rational rhs = evaluate(*node.rhs, answers);
                switch (node.op) {
                case '+': return lhs + rhs;
                case '-': return lhs - rhs;
                case '*': return lhs * rhs;
                default:
                    if (rhs == 0)
                        throw Error(ErrorCode::DivisionByZero, "division by zero in '" + unparse(expr) + "'");
                    return lhs / rhs;
                }
            } else {
                return evaluate_call(node, answers);
            }
        },
        expr.node);
}

std::optional<ValueRange> attainable_range(const Expr& expr,
                                           const std::map<std::string, ValueRange>& item_ranges) {
    auto range_of = [&](const std::string& id) -> std::optional<ValueRange> {
        auto it = item_ranges.find(id);
        if (it == item_ranges.end())
            return std::nullopt;
        return it->second;
    };
    return std::visit(
        [&](const auto& node) -> std::optional<ValueRange> {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Number>) {
                return ValueRange{node.value, node.value};
            } else if constexpr (std::is_same_v<T, Expr::Ref>) {
                return range_of(node.id);
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                auto a = attainable_range(*node.lhs, item_ranges);
                auto b = attainable_range(*node.rhs, item_ranges);
                if (!a || !b)
                    return std::nullopt;
                switch (node.op) {
                case '+': return ValueRange{a->lower + b->lower, a->upper + b->upper};
                case '-': return ValueRange{a->lower - b->upper, a->upper - b->lower};
                case '*':
                    return hull({a->lower * b->lower, a->lower * b->upper, a->upper * b->lower,
                                 a->upper * b->upper});
                default:
                    if (b->lower <= 0 && b->upper >= 0)
                        return std::nullopt;
                    return hull({a->lower / b->lower, a->lower / b->upper, a->upper / b->lower,
                                 a->upper / b->upper});
                }
            } else {
                std::vector<ValueRange> parts;
                for (const auto& id : node.refs) {
                    auto r = range_of(id);
                    if (!r)
                        return std::nullopt;
                    parts.push_back(*r);
                }
                ValueRange out{parts.front().lower, parts.front().upper};
                switch (node.fn) {
                case Function::Sum:
                    out = {Rational(0), Rational(0)};
                    for (const auto& p : parts) {
                        out.lower += p.lower;
                        out.upper += p.upper;
                    }
                    return out;
                case Function::Mean:
                    for (const auto& p : parts) {
                        out.lower = std::min(out.lower, p.lower);
                        out.upper = std::max(out.upper, p.upper);
                    }
                    return out;
                case Function::Min:
                    for (const auto& p : parts) {
                        out.lower = std::min(out.lower, p.lower);
                        out.upper = std::min(out.upper, p.upper);
                    }
                    return out;
                case Function::Max:
                    for (const auto& p : parts) {
                        out.lower = std::max(out.lower, p.lower);
                        out.upper = std::max(out.upper, p.upper);
                    }
                    return out;
                case Function::CountAnswered:
                    return ValueRange{Rational(0), Rational(static_cast<long>(parts.size()))};
                }
                return std::nullopt;
            }
        },
        expr.node);
}

} // namespace surveynet
