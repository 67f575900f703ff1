#include <surveynet/rational.hpp>

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace surveynet {

namespace {

using boost::multiprecision::cpp_int;

bool all_digits(std::string_view s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

} // namespace

std::string to_string(const Rational& value) {
    const cpp_int num = boost::multiprecision::numerator(value);
    const cpp_int den = boost::multiprecision::denominator(value);
    if (den == 1)
        return num.str();
    return num.str() + "/" + den.str();
}

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    Rational result;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
        cpp_int d{std::string(den)};
        if (d == 0)
            throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
        result = Rational(cpp_int(std::string(num)), d);
    } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto whole = s.substr(0, dot);
        auto frac = s.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac))
            throw std::invalid_argument("not a number: '" + std::string(text) + "'");
        cpp_int scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
            scale *= 10;
        cpp_int w = whole.empty() ? cpp_int(0) : cpp_int(std::string(whole));
        result = Rational(w * scale + cpp_int(std::string(frac)), scale);
    } else {
        if (!all_digits(s))
            throw std::invalid_argument("not a number: '" + std::string(text) + "'");
        result = Rational(cpp_int(std::string(s)));
    }
    return negative ? Rational(-result) : result;
}

std::string to_decimal(const Rational& value, int max_fraction_digits) {
    cpp_int num = boost::multiprecision::numerator(value);
    const cpp_int den = boost::multiprecision::denominator(value);
    std::string out;
    if (num < 0) {
        out.push_back('-');
        num = -num;
    }
    cpp_int scale = 1;
    for (int i = 0; i < max_fraction_digits; ++i)
        scale *= 10;
    // round half away from zero at the last kept digit
    cpp_int scaled = (num * scale * 2 + den) / (den * 2);
    cpp_int whole = scaled / scale;
    cpp_int frac = scaled % scale;
    if (whole == 0 && frac == 0 && !out.empty())
        out.clear();
    out += whole.str();
    if (frac != 0) {
        std::string digits = frac.str();
        digits.insert(0, static_cast<std::size_t>(max_fraction_digits) - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0')
            digits.pop_back();
        out += "." + digits;
    }
    return out;
}

double to_double(const Rational& value) {
    return value.convert_to<double>();
}

Rational from_double(double value) {
    if (!std::isfinite(value))
        throw std::invalid_argument("non-finite value");
    int exponent = 0;
    double mantissa = std::frexp(value, &exponent);
    // 53 significant bits
    auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    exponent -= 53;
    Rational result{cpp_int(scaled)};
    cpp_int two_pow = 1;
    two_pow <<= std::abs(exponent);
    if (exponent >= 0)
        result *= Rational(two_pow);
    else
        result /= Rational(two_pow);
    return result;
}

} // namespace surveynet
