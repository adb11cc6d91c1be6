#include "jointlab/poly.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "jointlab/errors.hpp"

namespace jointlab {

std::uint32_t total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), std::uint32_t{0});
}

bool GradedLexLess::operator()(const Exponents& a, const Exponents& b) const {
    auto da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return b < a;  // within a degree, larger exponent on x1 comes first
}

namespace {

void fill_monomials(std::size_t var, std::size_t n, std::uint32_t remaining, Exponents& cur,
                    std::vector<Exponents>& out) {
    if (var + 1 == n) {
        cur[var] = remaining;
        out.push_back(cur);
        return;
    }
    for (std::uint32_t e = remaining + 1; e-- > 0;) {
        cur[var] = e;
        fill_monomials(var + 1, n, remaining - e, cur, out);
    }
}

}  // namespace

std::vector<Exponents> monomials_of_degree(std::size_t n, std::uint32_t d) {
    std::vector<Exponents> out;
    if (n == 0) {
        if (d == 0) out.emplace_back();
        return out;
    }
    Exponents cur(n, 0);
    fill_monomials(0, n, d, cur, out);
    return out;
}

std::vector<Exponents> monomials_up_to(std::size_t n, std::uint32_t lo, std::uint32_t hi) {
    std::vector<Exponents> out;
    for (std::uint32_t d = lo; d <= hi; ++d) {
        auto m = monomials_of_degree(n, d);
        out.insert(out.end(), m.begin(), m.end());
    }
    return out;
}

// ---------------------------------------------------------------- MultiPoly

MultiPoly MultiPoly::constant(std::size_t n_vars, const Rational& c) {
    MultiPoly p(n_vars);
    p.add_term(Exponents(n_vars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(std::size_t n_vars, std::size_t i) {
    if (i >= n_vars) throw PreconditionError("MultiPoly::variable: index out of range");
    Exponents e(n_vars, 0);
    e[i] = 1;
    MultiPoly p(n_vars);
    p.add_term(e, 1);
    return p;
}

int MultiPoly::degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(total_degree(terms_.rbegin()->first));
}

Rational MultiPoly::coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational() : it->second;
}

void MultiPoly::add_term(const Exponents& e, const Rational& c) {
    if (e.size() != n_) throw PreconditionError("MultiPoly: exponent vector has wrong length");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Rational MultiPoly::evaluate(const QVector& x) const {
    if (x.size() != n_) throw PreconditionError("MultiPoly::evaluate: dimension mismatch");
    if (terms_.empty()) return Rational();
    const auto deg = static_cast<std::size_t>(degree());
    // powers[i][k] = x_i^k
    std::vector<std::vector<mpq_class>> powers(n_, std::vector<mpq_class>(deg + 1));
    for (std::size_t i = 0; i < n_; ++i) {
        powers[i][0] = 1;
        for (std::size_t k = 1; k <= deg; ++k) powers[i][k] = powers[i][k - 1] * x[i].value();
    }
    mpq_class acc, term;
    for (const auto& [e, c] : terms_) {
        term = c.value();
        for (std::size_t i = 0; i < n_; ++i)
            if (e[i]) term *= powers[i][e[i]];
        acc += term;
    }
    return Rational(std::move(acc));
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly p(*this);
    for (auto& [e, c] : p.terms_) c = -c;
    return p;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    if (o.n_ != n_) throw PreconditionError("MultiPoly: variable count mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    if (o.n_ != n_) throw PreconditionError("MultiPoly: variable count mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& s) {
    if (s.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    if (a.n_ != b.n_) throw PreconditionError("MultiPoly: variable count mismatch");
    MultiPoly out(a.n_);
    Exponents e(a.n_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < a.n_; ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    return out;
}

std::string MultiPoly::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    // highest degree first reads naturally
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        if (!s.empty()) s += c.sign() < 0 ? " - " : " + ";
        else if (c.sign() < 0) s += "-";
        Rational a = c.abs();
        bool unit = a == Rational(1) && total_degree(e) > 0;
        if (!unit) s += a.str();
        bool first = unit;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            if (!first) s += "*";
            first = false;
            s += "x" + std::to_string(i + 1);
            if (e[i] > 1) s += "^" + std::to_string(e[i]);
        }
    }
    return s;
}

// ---------------------------------------------------------------- UniPoly

UniPoly::UniPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

void UniPoly::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Rational UniPoly::evaluate(const Rational& t) const {
    mpq_class acc;
    for (std::size_t i = c_.size(); i-- > 0;) {
        acc *= t.value();
        acc += c_[i].value();
    }
    return Rational(std::move(acc));
}

UniPoly UniPoly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * Rational(static_cast<long>(i));
    return UniPoly(std::move(d));
}

UniPoly UniPoly::monic() const {
    if (is_zero()) return {};
    Rational inv = Rational(1) / leading();
    return inv * *this;
}

UniPoly operator+(const UniPoly& a, const UniPoly& b) {
    std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return UniPoly(std::move(c));
}

UniPoly operator-(const UniPoly& a, const UniPoly& b) {
    std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return UniPoly(std::move(c));
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<mpq_class> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i].value() * b.c_[j].value();
    std::vector<Rational> r;
    r.reserve(c.size());
    for (auto& x : c) r.emplace_back(std::move(x));
    return UniPoly(std::move(r));
}

UniPoly operator*(const Rational& s, const UniPoly& a) {
    std::vector<Rational> c(a.c_);
    for (auto& x : c) x *= s;
    return UniPoly(std::move(c));
}

std::string UniPoly::str() const {
    if (is_zero()) return "0";
    std::string s;
    for (std::size_t i = c_.size(); i-- > 0;) {
        const Rational& c = c_[i];
        if (c.is_zero()) continue;
        if (!s.empty()) s += c.sign() < 0 ? " - " : " + ";
        else if (c.sign() < 0) s += "-";
        Rational a = c.abs();
        bool show_coeff = i == 0 || a != Rational(1);
        if (show_coeff) s += a.str();
        if (i >= 1) s += show_coeff ? "*t" : "t";
        if (i >= 2) s += "^" + std::to_string(i);
    }
    return s;
}

DivMod divmod(const UniPoly& a, const UniPoly& b) {
    if (b.is_zero()) throw std::domain_error("UniPoly division by zero polynomial");
    if (a.degree() < b.degree()) return {UniPoly(), a};
    std::vector<mpq_class> r;
    for (const auto& c : a.coeffs()) r.push_back(c.value());
    const auto db = static_cast<std::size_t>(b.degree());
    const mpq_class lead = b.leading().value();
    std::vector<Rational> q(r.size() - db);
    for (std::size_t i = r.size(); i-- > db;) {
        if (sgn(r[i]) == 0) continue;
        mpq_class f = r[i] / lead;
        for (std::size_t j = 0; j <= db; ++j) r[i - db + j] -= f * b.coeffs()[j].value();
        q[i - db] = Rational(std::move(f));
    }
    std::vector<Rational> rem;
    for (std::size_t i = 0; i < db; ++i) rem.emplace_back(std::move(r[i]));
    return {UniPoly(std::move(q)), UniPoly(std::move(rem))};
}

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
    UniPoly x = a, y = b;
    while (!y.is_zero()) {
        UniPoly r = divmod(x, y).remainder;
        x = std::move(y);
        y = r.monic();
    }
    return x.monic();
}

UniPoly square_free_part(const UniPoly& q) {
    if (q.degree() <= 0) return q;
    UniPoly g = gcd(q, q.derivative());
    return divmod(q, g).quotient;
}

UniPoly restrict_to_line(const MultiPoly& p, const QVector& base, const QVector& dir) {
    const std::size_t n = p.n_vars();
    if (base.size() != n || dir.size() != n) throw PreconditionError("restrict_to_line: dimension mismatch");
    if (is_zero(dir)) throw PreconditionError("restrict_to_line: zero direction");
    if (p.is_zero()) return {};
    const auto deg = static_cast<std::size_t>(p.degree());
    // powers[i][k] = (base_i + dir_i t)^k
    std::vector<std::vector<UniPoly>> powers(n, std::vector<UniPoly>(deg + 1));
    for (std::size_t i = 0; i < n; ++i) {
        UniPoly lin({base[i], dir[i]});
        powers[i][0] = UniPoly({Rational(1)});
        for (std::size_t k = 1; k <= deg; ++k) powers[i][k] = powers[i][k - 1] * lin;
    }
    UniPoly acc;
    for (const auto& [e, c] : p.terms()) {
        UniPoly term({c});
        for (std::size_t i = 0; i < n; ++i)
            if (e[i]) term = term * powers[i][e[i]];
        acc = acc + term;
    }
    return acc;
}

// ---------------------------------------------------------------- Sturm

namespace {

// Dividing by |leading coefficient| keeps every sign and tames growth.
UniPoly normalize_positive(const UniPoly& p) {
    if (p.is_zero()) return p;
    return (Rational(1) / p.leading().abs()) * p;
}

int sign_at_infinity(const UniPoly& p, bool positive) {
    int s = p.leading().sign();
    if (!positive && p.degree() % 2 == 1) s = -s;
    return s;
}

std::size_t sign_variations(const std::vector<UniPoly>& chain, const Endpoint& at, bool upper) {
    std::size_t v = 0;
    int last = 0;
    for (const auto& p : chain) {
        int s = at ? p.sign_at(*at) : sign_at_infinity(p, upper);
        if (s == 0) continue;
        if (last != 0 && s != last) ++v;
        last = s;
    }
    return v;
}

}  // namespace

std::vector<UniPoly> sturm_chain(const UniPoly& q) {
    std::vector<UniPoly> chain;
    UniPoly p0 = normalize_positive(square_free_part(q));
    UniPoly p1 = normalize_positive(p0.derivative());
    chain.push_back(p0);
    if (p1.is_zero()) return chain;
    chain.push_back(p1);
    while (true) {
        UniPoly r = divmod(chain[chain.size() - 2], chain.back()).remainder;
        if (r.is_zero()) break;
        chain.push_back(normalize_positive(Rational(-1) * r));
    }
    return chain;
}

std::size_t sturm_root_count(const UniPoly& q, const Endpoint& lo, const Endpoint& hi) {
    if (q.is_zero()) throw PreconditionError("sturm_root_count: zero polynomial");
    if (lo && hi && !(*lo < *hi)) throw PreconditionError("sturm_root_count: empty interval");
    auto chain = sturm_chain(q);
    std::size_t va = sign_variations(chain, lo, false);
    std::size_t vb = sign_variations(chain, hi, true);
    return va - vb;
}

}  // namespace jointlab
