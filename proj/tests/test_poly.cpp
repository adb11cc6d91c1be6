#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "jointlab/errors.hpp"
#include "jointlab/poly.hpp"
#include "oracles.hpp"

using namespace jointlab;

namespace {

UniPoly uni(const std::vector<long>& c) { return UniPoly(std::vector<Rational>(c.begin(), c.end())); }

MultiPoly term(std::size_t n, Exponents e, const Rational& c) {
    MultiPoly p(n);
    p.add_term(e, c);
    return p;
}

MultiPoly random_multipoly(std::mt19937_64& rng, std::size_t n, std::uint32_t deg) {
    MultiPoly p(n);
    for (const auto& e : monomials_up_to(n, 0, deg))
        if (rng() % 2) p.add_term(e, Rational(static_cast<long>(rng() % 11) - 5, 1 + static_cast<long>(rng() % 3)));
    return p;
}

std::optional<mpq_class> to_oracle(const Endpoint& e) {
    if (!e) return std::nullopt;
    return e->value();
}

}  // namespace

TEST_CASE("graded lex order and monomial enumeration") {
    auto m2 = monomials_of_degree(2, 2);
    CHECK(m2 == std::vector<Exponents>{{2, 0}, {1, 1}, {0, 2}});
    auto all = monomials_up_to(2, 1, 2);
    CHECK(all == std::vector<Exponents>{{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}});
    CHECK(monomials_up_to(3, 0, 3).size() == 20);
    GradedLexLess less;
    CHECK(less({0, 1}, {2, 0}));
    CHECK(less({2, 0}, {1, 1}));
    CHECK_FALSE(less({1, 1}, {1, 1}));
}

TEST_CASE("multipoly stores no zero terms and multiplies exactly") {
    MultiPoly x = MultiPoly::variable(2, 0), y = MultiPoly::variable(2, 1);
    MultiPoly p = x * x + y * y - MultiPoly::constant(2, 1);
    CHECK(p.degree() == 2);
    CHECK(p.terms().size() == 3);
    CHECK((p - p).is_zero());
    CHECK((p - p).degree() == -1);
    MultiPoly q = (x + y) * (x - y);
    CHECK(q == x * x - y * y);
    CHECK(q.coefficient({1, 1}).is_zero());
    CHECK(p.evaluate({Rational(3, 5), Rational(4, 5)}).is_zero());
    CHECK_FALSE(p.str().empty());
}

TEST_CASE("restrict_to_line examples") {
    MultiPoly x = MultiPoly::variable(2, 0), y = MultiPoly::variable(2, 1);
    MultiPoly circle = x * x + y * y - MultiPoly::constant(2, 1);
    CHECK(restrict_to_line(circle, {0, 0}, {1, 0}) == uni({-1, 0, 1}));
    CHECK(restrict_to_line(x * y, {1, 1}, {1, -1}) == uni({1, 0, -1}));
    CHECK(restrict_to_line(x * x * x - y, {0, 0}, {1, 1}) == uni({0, -1, 0, 1}));
    CHECK_THROWS_AS(restrict_to_line(x, {0, 0}, {0, 0}), PreconditionError);
}

TEST_CASE("restrict_to_line agrees with interpolation and direct evaluation") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 150; ++trial) {
        std::size_t n = 2 + rng() % 3;
        auto p = random_multipoly(rng, n, static_cast<std::uint32_t>(1 + rng() % 4));
        QVector base(n), dir(n);
        for (auto& v : base) v = Rational(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 4));
        for (auto& v : dir) v = Rational(static_cast<long>(rng() % 7) - 3);
        if (is_zero(dir)) dir[0] = Rational(1);
        UniPoly r = restrict_to_line(p, base, dir);
        CHECK(r.degree() <= p.degree());
        CHECK(oracle::poly_of(r) == oracle::restrict_by_interpolation(p, base, dir));
        for (long t = -3; t <= 3; ++t) {
            Rational tt(t, 2);
            CHECK(r.evaluate(tt) == p.evaluate(base + tt * dir));
        }
    }
}

TEST_CASE("univariate division, gcd and square-free part") {
    UniPoly a = uni({-1, 0, 1});  // t^2 - 1
    UniPoly b = uni({-1, 1});     // t - 1
    auto dm = divmod(a, b);
    CHECK(dm.quotient == uni({1, 1}));
    CHECK(dm.remainder.is_zero());
    CHECK(gcd(a, uni({1, 2, 1})) == uni({1, 1}));
    UniPoly sq = b * b * uni({2, 1});
    CHECK(square_free_part(sq).monic() == (b * uni({2, 1})).monic());
    CHECK_THROWS(divmod(a, UniPoly()));
    CHECK(a.derivative() == uni({0, 2}));
}

TEST_CASE("sturm_root_count examples") {
    CHECK(sturm_root_count(uni({1, 0, 1})) == 0);
    CHECK(sturm_root_count(uni({0, -1, 0, 1}), Rational(-2), Rational(2)) == 3);
    CHECK(sturm_root_count(uni({-2, 0, 1}), Rational(0), Rational(2)) == 1);
    CHECK_THROWS_AS(sturm_root_count(UniPoly()), PreconditionError);
    CHECK_THROWS_AS(sturm_root_count(uni({1, 1}), Rational(1), Rational(1)), PreconditionError);
    // half-open: a root at the left end is excluded, at the right end included
    CHECK(sturm_root_count(uni({-1, 1}), Rational(1), Rational(2)) == 0);
    CHECK(sturm_root_count(uni({-1, 1}), Rational(0), Rational(1)) == 1);
    CHECK(sturm_root_count(uni({5})) == 0);
}

TEST_CASE("sturm counts match constructed roots on every interval") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 150; ++trial) {
        std::set<Rational> roots;
        std::size_t m = 1 + rng() % 6;
        UniPoly q = uni({static_cast<long>(1 + rng() % 3)});
        for (std::size_t i = 0; i < m; ++i) {
            Rational r(static_cast<long>(rng() % 21) - 10, 1 + static_cast<long>(rng() % 3));
            roots.insert(r);
            q = q * UniPoly({-r, Rational(1)});  // repeated roots allowed
        }
        if (rng() % 2) q = q * uni({1, 0, 1});  // no real roots
        for (int k = 0; k < 8; ++k) {
            Endpoint lo, hi;
            if (k % 4 != 0) lo = Rational(static_cast<long>(rng() % 25) - 12, 2);
            if (k % 4 != 1) hi = Rational(static_cast<long>(rng() % 25) - 12, 2);
            if (lo && hi && !(*lo < *hi)) std::swap(lo, hi);
            if (lo && hi && *lo == *hi) continue;
            std::size_t expect = 0;
            for (const auto& r : roots)
                if ((!lo || *lo < r) && (!hi || r <= *hi)) ++expect;
            CHECK(sturm_root_count(q, lo, hi) == expect);
            CHECK(oracle::root_count(oracle::poly_of(q), to_oracle(lo), to_oracle(hi)) == expect);
        }
    }
}

TEST_CASE("sturm counts match the bisection oracle on random polynomials") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t deg = rng() % 11;
        std::vector<Rational> c(deg + 1);
        for (auto& v : c) v = Rational(static_cast<long>(rng() % 21) - 10);
        if (c.back().is_zero()) c.back() = Rational(1);
        UniPoly q(c);
        CHECK(sturm_root_count(q) == oracle::root_count(oracle::poly_of(q), std::nullopt, std::nullopt));
        Rational lo(static_cast<long>(rng() % 9) - 4, 2);
        Rational hi = lo + Rational(1 + static_cast<long>(rng() % 6), 2);
        CHECK(sturm_root_count(q, lo, hi) == oracle::root_count(oracle::poly_of(q), lo.value(), hi.value()));
    }
}
