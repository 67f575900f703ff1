#pragma once

// Scoring-formula language.
//
//   expr   := term (("+" | "-") term)*
//   term   := factor (("*" | "/") factor)*
//   factor := number | item-ref | fn "(" ref-list ")" | "(" expr ")"
//   fn     := sum | mean | min | max | count_answered
//   ref-list := ref ("," ref)*      ref := item-ref | item-ref ".." item-ref
//
// A range such as Q1..Q10 expands to Q1, Q2, ..., Q10 at parse time.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <surveynet/error.hpp>
#include <surveynet/rational.hpp>

namespace surveynet {

enum class Function { Sum, Mean, Min, Max, CountAnswered };

std::string_view to_string(Function fn);
std::optional<Function> function_from_name(std::string_view name);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    struct Number {
        Rational value;
    };
    struct Ref {
        std::string id;
    };
    struct Binary {
        char op; // one of + - * /
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct Call {
        Function fn;
        std::vector<std::string> refs;
    };

    std::variant<Number, Ref, Binary, Call> node;
    std::size_t offset = 0; // source offset of the node's first character
};

/// Structural equality; source offsets are ignored.
bool same_tree(const Expr& a, const Expr& b);

struct Formula {
    std::string source;
    ExprPtr root;

    /// Every item id the formula mentions, in first-occurrence order.
    std::vector<std::string> references() const;
};

/// Syntax or name error with its position in the source text (line and column are 1-based).
class FormulaError : public Error {
public:
    FormulaError(ErrorCode code, const std::string& message, std::size_t offset, std::size_t line,
                 std::size_t column)
        : Error(code, message), offset_(offset), line_(line), column_(column) {}

    std::size_t offset() const noexcept { return offset_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t offset_;
    std::size_t line_;
    std::size_t column_;
};

class MissingAnswerError : public Error {
public:
    explicit MissingAnswerError(std::string item)
        : Error(ErrorCode::MissingAnswer, "missing answer for '" + item + "'"), item_(std::move(item)) {}

    const std::string& item() const noexcept { return item_; }

private:
    std::string item_;
};

Formula parse_formula(std::string_view source);

/// Like parse_formula, and additionally rejects references outside `scoreable`
/// (UnknownItem) or listed in `free_text` (FreeTextReference), reporting the offending position.
Formula parse_formula(std::string_view source, const std::set<std::string>& scoreable,
                      const std::set<std::string>& free_text = {});

/// Minimal-parenthesis rendering; parse(unparse(e)) is structurally identical to e.
std::string unparse(const Expr& expr);

/// Answered items only: an id absent from the map is a missing answer.
using AnswerMap = std::map<std::string, Rational>;

/// Exact evaluation. Bare refs and sum/min/max require every referenced answer;
/// mean and count_answered skip missing ones.
Rational evaluate(const Formula& formula, const AnswerMap& answers);
Rational evaluate(const Expr& expr, const AnswerMap& answers);

struct ValueRange {
    Rational lower;
    Rational upper;
};

/// Interval bound on the formula's value given per-item ranges. nullopt when an item range
/// is unknown or a divisor interval contains zero.
std::optional<ValueRange> attainable_range(const Expr& expr,
                                           const std::map<std::string, ValueRange>& item_ranges);

} // namespace surveynet
