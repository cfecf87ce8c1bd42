#pragma once

#include <gmpxx.h>

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

namespace sandwichkit {

/// Exact arbitrary-precision rational; the default field for every algorithm.
using Rational = mpq_class;

template <class F>
using Vec = std::vector<F>;

template <class F>
using Mat = std::vector<std::vector<F>>;

/// Raised for malformed inputs: dimension mismatches, empty data, bad numerals.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an operation's mathematical precondition does not hold.
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

template <class F>
struct field_traits;

template <>
struct field_traits<Rational> {
    static constexpr bool exact = true;
    static int sign(const Rational& x) { return sgn(x); }
    static Rational from_rational(const Rational& q) { return q; }
    static Rational to_rational(const Rational& x) { return x; }

    static std::string to_string(const Rational& x)
    {
        if (x.get_den() == 1)
            return x.get_num().get_str();
        return x.get_num().get_str() + "/" + x.get_den().get_str();
    }
};

template <>
struct field_traits<double> {
    static constexpr bool exact = false;

    /// Absolute tolerance used by sign(); per thread so concurrent solves never share it.
    static double& tolerance()
    {
        thread_local double tol = 1e-9;
        return tol;
    }

    static int sign(double x)
    {
        const double tol = tolerance();
        return x > tol ? 1 : (x < -tol ? -1 : 0);
    }
    static double from_rational(const Rational& q) { return q.get_d(); }
    static Rational to_rational(double x) { return Rational(x); }

    static std::string to_string(double x)
    {
        if (sign(x) == 0)
            x = 0.0;
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof buf, x);
        return std::string(buf, res.ptr);
    }
};

/// Sets the floating tolerance for the current thread and restores it on scope exit.
class ScopedTolerance {
public:
    explicit ScopedTolerance(double tol) : saved_(field_traits<double>::tolerance())
    {
        field_traits<double>::tolerance() = tol;
    }
    ~ScopedTolerance() { field_traits<double>::tolerance() = saved_; }
    ScopedTolerance(const ScopedTolerance&) = delete;
    ScopedTolerance& operator=(const ScopedTolerance&) = delete;

private:
    double saved_;
};

template <class F>
int sign(const F& x)
{
    return field_traits<F>::sign(x);
}

template <class F>
bool is_zero(const F& x)
{
    return sign(x) == 0;
}

template <class F>
bool approx_eq(const F& a, const F& b)
{
    return sign(F(a - b)) == 0;
}

template <class F>
std::string to_string(const F& x)
{
    return field_traits<F>::to_string(x);
}

template <class F>
F from_rational(const Rational& q)
{
    return field_traits<F>::from_rational(q);
}

/// Parses "p/q", integers, and decimals with optional exponent ("-1.25e-3") exactly.
inline Rational parse_rational(std::string_view text)
{
    auto fail = [&]() -> Rational {
        throw StructuralError("invalid numeral '" + std::string(text) + "'");
    };
    std::string_view s = text;
    while (!s.empty() && s.front() == ' ')
        s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
        s.remove_suffix(1);
    if (s.empty())
        return fail();

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0)
            throw StructuralError("zero denominator in '" + std::string(text) + "'");
        Rational q = num / den;
        q.canonicalize();
        return q;
    }

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string digits;
    long exponent = 0;
    bool seen_point = false;
    bool seen_digit = false;
    std::size_t i = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            seen_digit = true;
            if (seen_point)
                --exponent;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit)
        return fail();
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E')
            return fail();
        std::string_view exp_part = s.substr(i + 1);
        if (!exp_part.empty() && exp_part.front() == '+')
            exp_part.remove_prefix(1);
        long e = 0;
        auto [ptr, ec] = std::from_chars(exp_part.data(), exp_part.data() + exp_part.size(), e);
        if (ec != std::errc() || ptr != exp_part.data() + exp_part.size() || exp_part.empty())
            return fail();
        if (e > 100000 || e < -100000)
            return fail();
        exponent += e;
    }
    mpz_class mantissa(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational q = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

/// Value in the extended reals: finite, +inf or -inf.
template <class F>
class Extended {
public:
    enum class Kind { neg_inf, finite, pos_inf };

    Extended() = default;
    Extended(F value) : kind_(Kind::finite), value_(std::move(value)) {}
    template <class T>
        requires std::is_integral_v<T>
    Extended(T value) : kind_(Kind::finite), value_(value)
    {
    }

    static Extended pos_inf() { return Extended(Kind::pos_inf); }
    static Extended neg_inf() { return Extended(Kind::neg_inf); }

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    bool is_pos_inf() const { return kind_ == Kind::pos_inf; }
    bool is_neg_inf() const { return kind_ == Kind::neg_inf; }

    const F& value() const
    {
        if (!is_finite())
            throw std::logic_error("value() on infinite Extended");
        return value_;
    }

    /// Three-way comparison honoring the field tolerance.
    friend int compare(const Extended& a, const Extended& b)
    {
        if (a.kind_ != b.kind_ || !a.is_finite())
            return static_cast<int>(a.kind_) - static_cast<int>(b.kind_);
        return sign(F(a.value_ - b.value_));
    }
    friend bool operator==(const Extended& a, const Extended& b) { return compare(a, b) == 0; }
    friend bool operator<(const Extended& a, const Extended& b) { return compare(a, b) < 0; }
    friend bool operator<=(const Extended& a, const Extended& b) { return compare(a, b) <= 0; }
    friend bool operator>(const Extended& a, const Extended& b) { return compare(a, b) > 0; }
    friend bool operator>=(const Extended& a, const Extended& b) { return compare(a, b) >= 0; }

    friend Extended operator-(const Extended& a)
    {
        switch (a.kind_) {
        case Kind::neg_inf: return pos_inf();
        case Kind::pos_inf: return neg_inf();
        default: return Extended(F(-a.value_));
        }
    }

    /// Difference b - a where the result is defined; inf - inf is a logic error.
    friend Extended operator-(const Extended& b, const Extended& a)
    {
        if (b.is_finite() && a.is_finite())
            return Extended(F(b.value_ - a.value_));
        if (b.kind_ == a.kind_)
            throw std::logic_error("indeterminate infinity difference");
        if (b.is_pos_inf() || a.is_neg_inf())
            return pos_inf();
        return neg_inf();
    }

    std::string str() const
    {
        switch (kind_) {
        case Kind::neg_inf: return "-inf";
        case Kind::pos_inf: return "+inf";
        default: return to_string(value_);
        }
    }

private:
    explicit Extended(Kind k) : kind_(k) {}

    Kind kind_ = Kind::finite;
    F value_{};
};

/// Parses a numeral or "+inf"/"-inf"/"inf".
template <class F>
Extended<F> parse_extended(std::string_view s)
{
    if (s == "+inf" || s == "inf")
        return Extended<F>::pos_inf();
    if (s == "-inf")
        return Extended<F>::neg_inf();
    return Extended<F>(from_rational<F>(parse_rational(s)));
}

}  // namespace sandwichkit
