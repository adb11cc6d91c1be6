#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jointlab/linalg.hpp"
#include "jointlab/rational.hpp"

namespace jointlab {

using Exponents = std::vector<std::uint32_t>;

std::uint32_t total_degree(const Exponents& e);

/// Graded lexicographic order: lower total degree first; within a degree,
/// x1 > x2 > ... so x^2 precedes xy precedes y^2.
struct GradedLexLess {
    bool operator()(const Exponents& a, const Exponents& b) const;
};

/// All exponent vectors in n variables with total degree exactly d, in graded-lex order.
std::vector<Exponents> monomials_of_degree(std::size_t n, std::uint32_t d);
/// All exponent vectors with total degree in [lo, hi], in graded-lex order.
std::vector<Exponents> monomials_up_to(std::size_t n, std::uint32_t lo, std::uint32_t hi);

/// Sparse multivariate polynomial over Q. Zero coefficients are never stored.
class MultiPoly {
public:
    using Terms = std::map<Exponents, Rational, GradedLexLess>;

    explicit MultiPoly(std::size_t n_vars = 0) : n_(n_vars) {}

    static MultiPoly constant(std::size_t n_vars, const Rational& c);
    /// The coordinate function x_i.
    static MultiPoly variable(std::size_t n_vars, std::size_t i);

    std::size_t n_vars() const { return n_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// Max total degree over terms; -1 for the zero polynomial.
    int degree() const;

    Rational coefficient(const Exponents& e) const;
    void add_term(const Exponents& e, const Rational& c);

    Rational evaluate(const QVector& x) const;

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly& operator*=(const Rational& s);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(MultiPoly a, const Rational& s) { return a *= s; }

    friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

    std::string str() const;

private:
    std::size_t n_;
    Terms terms_;
};

/// Dense univariate polynomial over Q, coefficients in ascending degree.
/// Trailing zeros are trimmed, so the leading coefficient is nonzero unless
/// the polynomial is zero (empty coefficient list).
class UniPoly {
public:
    UniPoly() = default;
    explicit UniPoly(std::vector<Rational> coeffs);

    const std::vector<Rational>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const Rational& leading() const { return c_.back(); }
    Rational coefficient(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(); }

    Rational evaluate(const Rational& t) const;
    int sign_at(const Rational& t) const { return evaluate(t).sign(); }

    UniPoly derivative() const;
    UniPoly monic() const;

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b);
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b);
    friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
    friend UniPoly operator*(const Rational& s, const UniPoly& a);
    friend bool operator==(const UniPoly&, const UniPoly&) = default;

    std::string str() const;

private:
    void trim();
    std::vector<Rational> c_;
};

struct DivMod {
    UniPoly quotient;
    UniPoly remainder;
};
/// Euclidean division; throws std::domain_error for a zero divisor.
DivMod divmod(const UniPoly& a, const UniPoly& b);
/// Monic gcd (zero if both inputs are zero).
UniPoly gcd(const UniPoly& a, const UniPoly& b);
/// q / gcd(q, q'): same distinct roots, all simple.
UniPoly square_free_part(const UniPoly& q);

/// t -> P(base + t * dir), computed exactly.
UniPoly restrict_to_line(const MultiPoly& p, const QVector& base, const QVector& dir);

/// An interval endpoint; std::nullopt stands for -inf (lower) or +inf (upper).
using Endpoint = std::optional<Rational>;

/// Sturm chain of the square-free part of q.
std::vector<UniPoly> sturm_chain(const UniPoly& q);

/// Number of distinct real roots of q in (lo, hi]. Throws PreconditionError
/// for the zero polynomial or an empty interval.
std::size_t sturm_root_count(const UniPoly& q, const Endpoint& lo = std::nullopt,
                             const Endpoint& hi = std::nullopt);

}  // namespace jointlab
