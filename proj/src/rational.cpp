#include "canex/rational.hpp"

#include <cctype>

#include "canex/errors.hpp"

namespace canex {

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw DomainError("empty rational literal");
    auto integer = [&](std::string_view s) {
        if (s.empty()) throw DomainError("bad rational literal '" + std::string(text) + "'");
        std::size_t start = (s.front() == '-' || s.front() == '+') ? 1 : 0;
        if (start == s.size()) throw DomainError("bad rational literal '" + std::string(text) + "'");
        for (std::size_t k = start; k < s.size(); ++k)
            if (!std::isdigit(static_cast<unsigned char>(s[k])))
                throw DomainError("bad rational literal '" + std::string(text) + "'");
        return boost::multiprecision::cpp_int(std::string(s.front() == '+' ? s.substr(1) : s));
    };
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto den = integer(text.substr(slash + 1));
        if (den == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
        return Rational(integer(text.substr(0, slash)), den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        std::string digits(text.substr(0, dot));
        std::string frac(text.substr(dot + 1));
        if (digits.empty() || digits == "-" || digits == "+") digits += "0";
        boost::multiprecision::cpp_int scale = 1;
        for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
        bool negative = digits.front() == '-';
        auto whole = integer(digits);
        auto part = frac.empty() ? boost::multiprecision::cpp_int(0) : integer(frac);
        if (negative) part = -part;
        return Rational(whole * scale + part, scale);
    }
    return Rational(integer(text));
}

std::string to_string(const Rational& r) { return r.str(); }

}  // namespace canex
