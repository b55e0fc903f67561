/**
 * Exact rational numbers.
 *
 * Values whose numerator and denominator fit in 64 bits are kept inline and
 * handled with 128-bit intermediates; anything larger is promoted to a GMP
 * rational and demoted again as soon as it fits.
 */
#ifndef BAUTLAB_RATIONAL_HPP
#define BAUTLAB_RATIONAL_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace bautlab {

class Rational {
public:
    Rational() = default;
    Rational(long long n) : Rational(n, 1) {}  // NOLINT(google-explicit-constructor)
    Rational(int n) : num_(n) {}               // NOLINT(google-explicit-constructor)
    Rational(long long n, long long d);
    explicit Rational(const mpq_class& q);

    /// Parses "p/q", "p" or "-p/q". Throws std::invalid_argument.
    static Rational parse(std::string_view text);

    bool is_zero() const { return !big_ && num_ == 0; }
    bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
    int sign() const;

    mpq_class to_mpq() const;
    std::string str() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b);
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b);

    friend std::ostream& operator<<(std::ostream& os, const Rational& r);

private:
    void assign_big(const mpq_class& q);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    // Set only when the reduced value does not fit in 64-bit numerator/denominator.
    std::shared_ptr<const mpq_class> big_;
};

/// (-1)^k as a small integer.
inline int parity_sign(long long k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace bautlab

#endif
