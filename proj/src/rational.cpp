#include "jointlab/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace jointlab {

Rational::Rational(long num, long den) : v_(num, den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) : v_(num, den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_.canonicalize();
}

Rational Rational::from_double(double d) {
    if (!std::isfinite(d)) throw std::invalid_argument("Rational: non-finite double");
    return Rational(mpq_class(d));
}

namespace {

bool is_decimal_integer(std::string_view s, bool allow_sign) {
    if (allow_sign && !s.empty() && s.front() == '-') s.remove_prefix(1);
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    auto bad = [&] { return std::invalid_argument("Rational: malformed \"" + std::string(text) + "\""); };
    auto dot = text.find('.');
    if (dot != std::string_view::npos) {
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole.front() == '-';
        if (negative) whole.remove_prefix(1);
        if (whole.empty() || !is_decimal_integer(whole, false) || !is_decimal_integer(frac, false)) throw bad();
        mpz_class digits(std::string(whole) + std::string(frac), 10);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        if (negative) digits = -digits;
        return Rational(digits, scale);
    }
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1")
                                                           : text.substr(slash + 1);
    if (!is_decimal_integer(num, true) || !is_decimal_integer(den, false)) throw bad();
    mpz_class p(std::string(num), 10);
    mpz_class q(std::string(den), 10);
    if (q == 0) throw std::invalid_argument("Rational: zero denominator");
    return Rational(p, q);
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    v_ /= o.v_;
    return *this;
}

namespace {

std::size_t hash_mpz(const mpz_class& z, std::size_t seed) {
    const mpz_srcptr p = z.get_mpz_t();
    seed ^= static_cast<std::size_t>(p->_mp_size) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    int limbs = p->_mp_size < 0 ? -p->_mp_size : p->_mp_size;
    for (int i = 0; i < limbs; ++i)
        seed ^= static_cast<std::size_t>(p->_mp_d[i]) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
}

}  // namespace

std::size_t Rational::hash() const {
    return hash_mpz(v_.get_den(), hash_mpz(v_.get_num(), 0));
}

Rational floor(const Rational& r) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), r.num().get_mpz_t(), r.den().get_mpz_t());
    return Rational(q);
}

Rational ceil(const Rational& r) {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), r.num().get_mpz_t(), r.den().get_mpz_t());
    return Rational(q);
}

Rational simplest_between(const Rational& lo, const Rational& hi) {
    if (!(lo < hi)) throw std::invalid_argument("simplest_between: empty interval");
    if (lo.sign() < 0 && hi.sign() > 0) return Rational();
    if (hi.sign() <= 0) return -simplest_between(-hi, -lo);
    // 0 <= lo < hi from here on; walk the continued fraction expansion.
    Rational fl = floor(lo);
    Rational next = fl + Rational(1);
    if (next < hi) return next;
    if (fl == lo) {
        // (fl, hi) with hi <= fl + 1: fl + 1 / x where x > 1 / (hi - fl)
        Rational bound = Rational(1) / (hi - fl);
        return fl + Rational(1) / (floor(bound) + Rational(1));
    }
    return fl + Rational(1) / simplest_between(Rational(1) / (hi - fl), Rational(1) / (lo - fl));
}

}  // namespace jointlab
