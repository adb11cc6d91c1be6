#include "jointlab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jointlab/errors.hpp"
#include "jointlab/random.hpp"

namespace jointlab {

std::size_t lifted_dimension(std::size_t n, std::size_t d) {
    // C(n + d, d) computed incrementally; exact at every step.
    std::size_t c = 1;
    for (std::size_t i = 1; i <= d; ++i) c = c * (n + i) / i;
    return c - 1;
}

QVector monomial_lift(const QVector& x, std::size_t d) {
    if (d < 1) throw PreconditionError("monomial_lift: degree must be at least 1");
    const std::size_t n = x.size();
    std::vector<std::vector<mpq_class>> powers(n, std::vector<mpq_class>(d + 1));
    for (std::size_t i = 0; i < n; ++i) {
        powers[i][0] = 1;
        for (std::size_t k = 1; k <= d; ++k) powers[i][k] = powers[i][k - 1] * x[i].value();
    }
    QVector out;
    for (const auto& e : monomials_up_to(n, 1, static_cast<std::uint32_t>(d))) {
        mpq_class v = 1;
        for (std::size_t i = 0; i < n; ++i)
            if (e[i]) v *= powers[i][e[i]];
        out.emplace_back(std::move(v));
    }
    return out;
}

namespace {

// ---------------------------------------------------------------- search

struct Score {
    std::size_t excess = 0;  // points over the cap, summed over sets and sides
    double imbalance = 0.0;  // sum over sets of |pos - neg| / |set|
    std::size_t zeroed = 0;  // points placed on the zero set
    bool operator<(const Score& o) const {
        if (excess != o.excess) return excess < o.excess;
        if (std::abs(imbalance - o.imbalance) > 1e-12) return imbalance < o.imbalance;
        return zeroed < o.zeroed;
    }
};

// Running per-set side counts with an incrementally maintained Score.
class Tally {
public:
    Tally(std::span<const std::size_t> sizes, std::span<const std::size_t> caps)
        : sizes_(sizes), caps_(caps), pos_(sizes.size(), 0), neg_(sizes.size(), 0) {}

    void add(std::size_t set, int side) { update(set, side, +1); }
    void remove(std::size_t set, int side) { update(set, side, -1); }
    const Score& score() const { return score_; }

private:
    double contribution(std::size_t s, std::size_t& excess) const {
        excess = (pos_[s] > caps_[s] ? pos_[s] - caps_[s] : 0) + (neg_[s] > caps_[s] ? neg_[s] - caps_[s] : 0);
        if (sizes_[s] == 0) return 0.0;
        double diff = static_cast<double>(pos_[s]) - static_cast<double>(neg_[s]);
        return std::abs(diff) / static_cast<double>(sizes_[s]);
    }

    void update(std::size_t s, int side, int delta) {
        std::size_t old_excess = 0, new_excess = 0;
        double old_imb = contribution(s, old_excess);
        if (side > 0) pos_[s] += delta;
        else if (side < 0) neg_[s] += delta;
        else score_.zeroed += delta;
        double new_imb = contribution(s, new_excess);
        score_.excess = score_.excess - old_excess + new_excess;
        score_.imbalance += new_imb - old_imb;
    }

    std::span<const std::size_t> sizes_;
    std::span<const std::size_t> caps_;
    std::vector<std::size_t> pos_, neg_;
    Score score_;
};

int sign_of(double v) { return v > 0 ? 1 : v < 0 ? -1 : 0; }

// Dyadic rational with the fewest significant bits in the middle half of (lo, hi).
double short_dyadic_between(double lo, double hi) {
    double q = (hi - lo) / 4;
    double a = lo + q, b = hi - q;
    if (!(a < b)) return (lo + hi) / 2;
    int e = std::ilogb(b - a) + 1;
    for (int k = 0; k < 80; ++k, --e) {
        double step = std::ldexp(1.0, e);
        double m = std::ceil(a / step) * step;
        if (m <= b) return m;
    }
    return (lo + hi) / 2;
}

class BisectionSearch {
public:
    BisectionSearch(std::span<const std::vector<QVector>> sets, std::span<const std::size_t> caps, std::size_t d,
                    std::uint64_t seed)
        : d_(d), caps_(caps.begin(), caps.end()), rng_(seed) {
        for (std::size_t s = 0; s < sets.size(); ++s) {
            sizes_.push_back(sets[s].size());
            for (const auto& p : sets[s]) {
                points_.push_back(&p);
                set_of_.push_back(s);
            }
        }
        n_ = points_.front()->size();
        monomials_ = monomials_up_to(n_, 1, static_cast<std::uint32_t>(d));
        width_ = monomials_.size() + 1;
        build_features();
    }

    std::optional<MultiPoly> run(std::size_t budget) {
        randomize();
        std::size_t stall = 0;
        const std::size_t stall_limit = 4 * width_ + 8;
        bool dirty = true;
        for (std::size_t iter = 0; iter < budget; ++iter) {
            if (dirty && (current_.excess == 0 || stall >= stall_limit)) {
                if (auto p = finalize()) return p;
                dirty = false;
            }
            if (stall >= stall_limit) {
                randomize();
                stall = 0;
                dirty = true;
                continue;
            }
            std::vector<double> dir;
            std::optional<std::size_t> axis;
            switch (iter % 4) {
                case 0: dir = targeted_direction(); break;
                case 1: axis = 0; break;
                case 2: axis = 1 + (coord_cursor_++ % (width_ - 1)); break;
                default: dir = random_direction(); break;
            }
            if (axis) dir = unit_direction(*axis);
            if (line_search(dir, axis)) {
                stall = 0;
                dirty = true;
            } else {
                ++stall;
            }
        }
        if (dirty) return finalize();
        return std::nullopt;
    }

private:
    void build_features() {
        const std::size_t np = points_.size();
        feat_.assign(np * width_, 0.0);
        scale_.assign(width_, 0.0);
        std::vector<double> x(n_);
        for (std::size_t p = 0; p < np; ++p) {
            for (std::size_t i = 0; i < n_; ++i) x[i] = (*points_[p])[i].to_double();
            double* row = &feat_[p * width_];
            row[0] = 1.0;
            for (std::size_t j = 0; j < monomials_.size(); ++j) {
                double v = 1.0;
                for (std::size_t i = 0; i < n_; ++i)
                    for (std::uint32_t k = 0; k < monomials_[j][i]; ++k) v *= x[i];
                row[j + 1] = v;
            }
            for (std::size_t j = 0; j < width_; ++j) scale_[j] += row[j] * row[j];
        }
        for (auto& s : scale_) {
            s = std::sqrt(s / static_cast<double>(np));
            if (!(s > 0) || !std::isfinite(s)) s = 1.0;
        }
    }

    void recompute_values() {
        const std::size_t np = points_.size();
        value_.assign(np, 0.0);
        Tally tally(sizes_, caps_);
        for (std::size_t p = 0; p < np; ++p) {
            const double* row = &feat_[p * width_];
            double v = 0.0;
            for (std::size_t j = 0; j < width_; ++j) v += coef_[j] * row[j];
            value_[p] = v;
            tally.add(set_of_[p], sign_of(v));
        }
        current_ = tally.score();
    }

    void randomize() {
        coef_.assign(width_, 0.0);
        for (std::size_t j = 1; j < width_; ++j) {
            double r = 2.0 * draw_unit(rng_) - 1.0;
            // keep 8 significant bits so the exact polynomial stays small
            int e = std::ilogb(scale_[j]);
            coef_[j] = std::ldexp(std::round(r * 256.0) / 256.0, -e);
        }
        recompute_values();
        line_search(unit_direction(0), 0);
    }

    std::vector<double> unit_direction(std::size_t j) const {
        std::vector<double> w(width_, 0.0);
        w[j] = 1.0;
        return w;
    }

    std::vector<double> random_direction() {
        std::vector<double> w(width_);
        for (std::size_t j = 0; j < width_; ++j) w[j] = (2.0 * draw_unit(rng_) - 1.0) / scale_[j];
        return w;
    }

    // Least-norm direction (in scaled coordinates) that moves the boundary of
    // each set, to first order, toward balance: for every set the mean scaled
    // feature of its points nearest the boundary should see a shift
    // proportional to -(pos - neg) / |set|.
    std::vector<double> targeted_direction() {
        const std::size_t m = sizes_.size();
        std::vector<std::vector<std::size_t>> members(m);
        std::vector<long> balance(m, 0);
        for (std::size_t p = 0; p < points_.size(); ++p) {
            members[set_of_[p]].push_back(p);
            balance[set_of_[p]] += sign_of(value_[p]);
        }
        std::vector<std::vector<double>> g;
        std::vector<double> target;
        for (std::size_t s = 0; s < m; ++s) {
            auto& idx = members[s];
            if (idx.empty()) continue;
            std::size_t k = std::min(idx.size(), std::max<std::size_t>(4, idx.size() / 8));
            std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(),
                             [&](std::size_t a, std::size_t b) { return std::abs(value_[a]) < std::abs(value_[b]); });
            std::vector<double> mean(width_, 0.0);
            for (std::size_t t = 0; t < k; ++t)
                for (std::size_t j = 0; j < width_; ++j) mean[j] += feat_[idx[t] * width_ + j] / scale_[j];
            for (auto& v : mean) v /= static_cast<double>(k);
            g.push_back(std::move(mean));
            target.push_back(-static_cast<double>(balance[s]) / static_cast<double>(idx.size()));
        }
        const std::size_t r = g.size();
        // (G G^T + lambda I) y = target, w = G^T y
        std::vector<double> a(r * (r + 1), 0.0);
        double trace = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t k = 0; k < r; ++k) {
                double v = 0.0;
                for (std::size_t j = 0; j < width_; ++j) v += g[i][j] * g[k][j];
                a[i * (r + 1) + k] = v;
            }
            trace += a[i * (r + 1) + i];
            a[i * (r + 1) + r] = target[i];
        }
        const double lambda = 1e-9 * (trace / static_cast<double>(std::max<std::size_t>(r, 1)) + 1e-300);
        for (std::size_t i = 0; i < r; ++i) a[i * (r + 1) + i] += lambda;
        for (std::size_t c = 0; c < r; ++c) {
            std::size_t piv = c;
            for (std::size_t i = c + 1; i < r; ++i)
                if (std::abs(a[i * (r + 1) + c]) > std::abs(a[piv * (r + 1) + c])) piv = i;
            if (piv != c)
                for (std::size_t j = 0; j <= r; ++j) std::swap(a[c * (r + 1) + j], a[piv * (r + 1) + j]);
            double lead = a[c * (r + 1) + c];
            if (lead == 0.0) continue;
            for (std::size_t i = 0; i < r; ++i) {
                if (i == c) continue;
                double f = a[i * (r + 1) + c] / lead;
                if (f == 0.0) continue;
                for (std::size_t j = c; j <= r; ++j) a[i * (r + 1) + j] -= f * a[c * (r + 1) + j];
            }
        }
        std::vector<double> w(width_, 0.0);
        for (std::size_t i = 0; i < r; ++i) {
            double lead = a[i * (r + 1) + i];
            double y = lead == 0.0 ? 0.0 : a[i * (r + 1) + r] / lead;
            for (std::size_t j = 0; j < width_; ++j) w[j] += y * g[i][j];
        }
        bool nonzero = false;
        for (std::size_t j = 0; j < width_; ++j) {
            w[j] /= scale_[j];
            nonzero = nonzero || (w[j] != 0.0 && std::isfinite(w[j]));
            if (!std::isfinite(w[j])) w[j] = 0.0;
        }
        return nonzero ? w : random_direction();
    }

    // Exact sweep over every distinct sign pattern reachable by moving along
    // `dir`; takes the best open interval if it strictly improves the score.
    bool line_search(const std::vector<double>& dir, std::optional<std::size_t> axis = std::nullopt) {
        const std::size_t np = points_.size();
        std::vector<std::pair<double, std::size_t>> events;
        std::vector<double> slope(np);
        Tally tally(sizes_, caps_);
        for (std::size_t p = 0; p < np; ++p) {
            const double* row = &feat_[p * width_];
            double a = 0.0;
            for (std::size_t j = 0; j < width_; ++j) a += dir[j] * row[j];
            slope[p] = a;
            double t = a != 0.0 ? -value_[p] / a : 0.0;
            if (a != 0.0 && std::isfinite(t)) {
                events.emplace_back(t, p);
                tally.add(set_of_[p], a > 0 ? -1 : 1);
            } else {
                tally.add(set_of_[p], sign_of(value_[p]));
            }
        }
        if (events.empty()) return false;
        std::sort(events.begin(), events.end());

        Score best = tally.score();
        std::size_t best_group = 0;  // interval index: 0 is (-inf, t_0)
        std::size_t group = 0;
        for (std::size_t e = 0; e < events.size();) {
            std::size_t f = e;
            while (f < events.size() && events[f].first == events[e].first) {
                std::size_t p = events[f].second;
                int before = slope[p] > 0 ? -1 : 1;
                tally.remove(set_of_[p], before);
                tally.add(set_of_[p], -before);
                ++f;
            }
            ++group;
            if (tally.score() < best) {
                best = tally.score();
                best_group = group;
            }
            e = f;
        }
        if (!(best < current_)) return false;

        // Distinct breakpoints bounding the chosen interval.
        std::vector<double> cuts;
        for (const auto& ev : events)
            if (cuts.empty() || cuts.back() != ev.first) cuts.push_back(ev.first);
        double span = cuts.size() > 1 ? cuts.back() - cuts.front() : std::max(1.0, std::abs(cuts.front()));
        if (!(span > 0)) span = 1.0;
        double lo = best_group == 0 ? cuts.front() - span : cuts[best_group - 1];
        double hi = best_group == cuts.size() ? cuts.back() + span : cuts[best_group];

        if (axis) {
            coef_[*axis] = short_dyadic_between(coef_[*axis] + lo, coef_[*axis] + hi);
        } else {
            double delta = short_dyadic_between(lo, hi);
            for (std::size_t j = 0; j < width_; ++j) coef_[j] += delta * dir[j];
        }
        Score before = current_;
        recompute_values();
        // Rounding in the update can cost the improvement; it only matters
        // for convergence, which the caller tracks through the score.
        return current_ < before;
    }

    // Exact stage: freezes the non-constant coefficients as rationals and
    // sweeps the constant term over every distinct exact value pattern,
    // including patterns that put a cluster of coincident values on P = 0.
    std::optional<MultiPoly> finalize() {
        if (exact_lift_.empty())
            for (const auto* p : points_) exact_lift_.push_back(monomial_lift(*p, d_));
        const std::size_t np = points_.size();
        const std::size_t nm = monomials_.size();
        std::vector<mpq_class> c(nm);
        bool any_nonconstant = false;
        for (std::size_t j = 0; j < nm; ++j) {
            c[j] = mpq_class(coef_[j + 1]);
            any_nonconstant = any_nonconstant || sgn(c[j]) != 0;
        }
        std::vector<Rational> u(np);
        for (std::size_t p = 0; p < np; ++p) {
            mpq_class acc;
            for (std::size_t j = 0; j < nm; ++j)
                if (sgn(c[j]) != 0) acc += c[j] * exact_lift_[p][j].value();
            u[p] = Rational(std::move(acc));
        }
        std::vector<std::size_t> order(np);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return u[a] < u[b]; });
        std::vector<std::size_t> group_start;
        for (std::size_t i = 0; i < np; ++i)
            if (i == 0 || u[order[i]] != u[order[i - 1]]) group_start.push_back(i);
        group_start.push_back(np);
        const std::size_t groups = group_start.size() - 1;

        // candidate encoding: 2g = group g zeroed, 2g + 1 = gap just above group g, -1 = below everything
        Tally tally(sizes_, caps_);
        for (std::size_t p = 0; p < np; ++p) tally.add(set_of_[p], 1);
        Score best = tally.score();
        long best_candidate = -1;
        for (std::size_t g = 0; g < groups; ++g) {
            for (std::size_t i = group_start[g]; i < group_start[g + 1]; ++i) {
                tally.remove(set_of_[order[i]], 1);
                tally.add(set_of_[order[i]], 0);
            }
            if (tally.score() < best) {
                best = tally.score();
                best_candidate = static_cast<long>(2 * g);
            }
            for (std::size_t i = group_start[g]; i < group_start[g + 1]; ++i) {
                tally.remove(set_of_[order[i]], 0);
                tally.add(set_of_[order[i]], -1);
            }
            if (tally.score() < best) {
                best = tally.score();
                best_candidate = static_cast<long>(2 * g + 1);
            }
        }
        if (best.excess != 0) return std::nullopt;

        auto value_of_group = [&](std::size_t g) -> const Rational& { return u[order[group_start[g]]]; };
        Rational c0;
        if (best_candidate < 0) {
            c0 = floor(-value_of_group(0)) + Rational(1);
        } else if (best_candidate % 2 == 0) {
            c0 = -value_of_group(static_cast<std::size_t>(best_candidate / 2));
        } else {
            auto g = static_cast<std::size_t>(best_candidate / 2);
            if (g + 1 == groups) c0 = ceil(-value_of_group(g)) - Rational(1);
            else c0 = simplest_between(-value_of_group(g + 1), -value_of_group(g));
        }
        if (!any_nonconstant && c0.is_zero()) return std::nullopt;

        MultiPoly poly(n_);
        poly.add_term(Exponents(n_, 0), c0);
        for (std::size_t j = 0; j < nm; ++j) poly.add_term(monomials_[j], Rational(std::move(c[j])));
        return poly;
    }

    std::size_t d_;
    std::size_t n_ = 0;
    std::vector<std::size_t> caps_;
    std::vector<std::size_t> sizes_;
    std::vector<const QVector*> points_;
    std::vector<std::size_t> set_of_;
    std::vector<Exponents> monomials_;
    std::size_t width_ = 0;
    std::vector<double> feat_;
    std::vector<double> scale_;
    std::vector<double> coef_;
    std::vector<double> value_;
    std::vector<QVector> exact_lift_;
    Score current_;
    std::size_t coord_cursor_ = 0;
    Rng rng_;
};

void verify_bisection(const MultiPoly& p, std::span<const std::vector<QVector>> sets, std::span<const std::size_t> caps) {
    if (p.is_zero()) throw InvariantViolation("bisection produced the zero polynomial");
    for (std::size_t s = 0; s < sets.size(); ++s) {
        std::size_t pos = 0, neg = 0;
        for (const auto& x : sets[s]) {
            int sg = p.evaluate(x).sign();
            pos += sg > 0;
            neg += sg < 0;
        }
        if (pos > caps[s] || neg > caps[s])
            throw InvariantViolation("bisection verification failed for set " + std::to_string(s) + ": " +
                                     std::to_string(pos) + " positive, " + std::to_string(neg) + " negative, cap " +
                                     std::to_string(caps[s]));
    }
}

std::size_t ceil_to_size(const Rational& r) {
    return static_cast<std::size_t>(ceil(r).num().get_ui());
}

}  // namespace

MultiPoly bisect_with_caps(std::span<const std::vector<QVector>> sets, std::span<const std::size_t> caps,
                           std::size_t d, std::uint64_t seed, const BisectOptions& options) {
    if (d < 1) throw PreconditionError("bisect_sets: degree must be at least 1");
    if (sets.empty()) throw PreconditionError("bisect_sets: no sets");
    if (caps.size() != sets.size()) throw PreconditionError("bisect_sets: need one cap per set");
    std::size_t total = 0;
    std::size_t n = 0;
    for (const auto& s : sets)
        for (const auto& p : s) {
            if (total == 0) n = p.size();
            else if (p.size() != n) throw PreconditionError("bisect_sets: points of different dimensions");
            ++total;
        }
    if (total == 0) throw PreconditionError("bisect_sets: no points");
    if (n == 0) throw PreconditionError("bisect_sets: zero-dimensional points");
    if (sets.size() > lifted_dimension(n, d))
        throw PreconditionError("bisect_sets: " + std::to_string(sets.size()) + " sets exceed the lifted dimension " +
                                std::to_string(lifted_dimension(n, d)) + " of degree " + std::to_string(d));

    const std::size_t budget = options.iteration_budget ? options.iteration_budget : 10 * total;
    BisectionSearch search(sets, caps, d, seed);
    auto poly = search.run(budget);
    if (!poly)
        throw SearchExhausted("bisect_sets: no polynomial of degree " + std::to_string(d) + " found within " +
                              std::to_string(budget) + " iterations; raise the degree or the tolerance");
    verify_bisection(*poly, sets, caps);
    return *poly;
}

MultiPoly bisect_sets(std::span<const std::vector<QVector>> sets, std::size_t d, const Rational& tolerance,
                      std::uint64_t seed, const BisectOptions& options) {
    if (tolerance.sign() < 0 || !(tolerance < Rational(1, 2)))
        throw PreconditionError("bisect_sets: tolerance must lie in [0, 1/2)");
    std::vector<std::size_t> caps;
    for (const auto& s : sets)
        caps.push_back(ceil_to_size(Rational(static_cast<long>(s.size())) * (Rational(1) + tolerance) / Rational(2)));
    return bisect_with_caps(sets, caps, d, seed, options);
}

// ---------------------------------------------------------------- partition

std::size_t PartitionResult::max_class_count() const {
    std::size_t m = 0;
    for (const auto& [sv, c] : class_counts) m = std::max(m, c);
    return m;
}

MultiPoly PartitionResult::product() const {
    MultiPoly p = MultiPoly::constant(n, 1);
    for (const auto& f : factors) p = p * f;
    return p;
}

std::optional<SignVector> PartitionResult::classify(const QVector& x) const {
    SignVector sv;
    for (const auto& f : factors) {
        int s = f.evaluate(x).sign();
        if (s == 0) return std::nullopt;
        sv.signs.push_back(s > 0 ? '+' : '-');
    }
    return sv;
}

std::size_t partition_class_bound(std::size_t total, const Rational& tolerance, std::size_t j) {
    Rational v(static_cast<long>(total));
    Rational ratio = (Rational(1) + tolerance) / Rational(2);
    for (std::size_t i = 0; i < j; ++i) v *= ratio;
    return ceil_to_size(v);
}

PartitionResult partition_points(std::span<const QVector> points, std::size_t n, std::size_t degree,
                                 const Rational& tolerance, std::uint64_t seed, const BisectOptions& options) {
    if (points.empty()) throw PreconditionError("partition_points: empty point set");
    if (degree < 1) throw PreconditionError("partition_points: degree must be at least 1");
    if (n < 1) throw PreconditionError("partition_points: dimension must be at least 1");
    if (tolerance.sign() < 0 || !(tolerance < Rational(1, 2)))
        throw PreconditionError("partition_points: tolerance must lie in [0, 1/2)");
    for (const auto& p : points)
        if (p.size() != n) throw PreconditionError("partition_points: point dimension differs from n");

    PartitionResult out;
    out.n = n;
    out.degree_budget = degree;
    out.tolerance = tolerance;
    out.assignment.assign(points.size(), SignVector{});

    std::map<SignVector, std::vector<std::size_t>> classes;
    classes[SignVector{}].resize(points.size());
    std::iota(classes[SignVector{}].begin(), classes[SignVector{}].end(), 0);

    std::size_t used = 0;
    for (std::size_t step = 1;; ++step) {
        if (classes.empty()) break;
        const std::size_t scheduled = std::size_t{1} << (step - 1);
        std::size_t d = 1;
        while (lifted_dimension(n, d) < scheduled) ++d;
        if (used + d > degree) break;

        const std::size_t bound = partition_class_bound(points.size(), tolerance, step);
        std::vector<std::vector<QVector>> sets;
        std::vector<std::size_t> caps;
        for (const auto& [sv, idx] : classes) {
            std::vector<QVector> pts;
            pts.reserve(idx.size());
            for (auto i : idx) pts.push_back(points[i]);
            const std::size_t local = ceil_to_size(Rational(static_cast<long>(idx.size())) *
                                                   (Rational(1) + tolerance) / Rational(2));
            caps.push_back(std::min(local, bound));
            sets.push_back(std::move(pts));
        }
        MultiPoly factor = bisect_with_caps(sets, caps, d, mix_seed(seed, step), options);

        std::map<SignVector, std::vector<std::size_t>> next;
        for (const auto& [sv, idx] : classes)
            for (auto i : idx) {
                int s = factor.evaluate(points[i]).sign();
                if (s == 0) {
                    out.assignment[i].reset();
                    out.zero_set_points.push_back(i);
                    continue;
                }
                SignVector child{sv.signs + (s > 0 ? '+' : '-')};
                out.assignment[i] = child;
                next[child].push_back(i);
            }
        classes = std::move(next);
        out.factors.push_back(std::move(factor));
        used += d;
    }

    out.product_degree = 0;
    for (const auto& f : out.factors) out.product_degree += static_cast<std::size_t>(std::max(f.degree(), 0));
    std::sort(out.zero_set_points.begin(), out.zero_set_points.end());
    for (const auto& [sv, idx] : classes) out.class_counts[sv] = idx.size();
    out.class_bound = partition_class_bound(points.size(), tolerance, out.j());

    std::size_t accounted = out.zero_set_points.size();
    for (const auto& [sv, c] : out.class_counts) {
        accounted += c;
        if (c > out.class_bound)
            throw InvariantViolation("partition_points: class " + sv.signs + " holds " + std::to_string(c) +
                                     " points, bound " + std::to_string(out.class_bound));
    }
    if (accounted != points.size()) throw InvariantViolation("partition_points: points lost during partitioning");
    if (out.product_degree > degree) throw InvariantViolation("partition_points: degree budget exceeded");
    return out;
}

std::size_t line_cell_crossings(const PartitionResult& pr, const AffineFlat& line) {
    if (line.dim() != 1) throw PreconditionError("line_cell_crossings: flat is not a line");
    if (line.ambient_dim() != pr.n) throw PreconditionError("line_cell_crossings: dimension mismatch");
    const QVector dir = line.direction_rows().row(0);
    UniPoly product({Rational(1)});
    for (std::size_t i = 0; i < pr.factors.size(); ++i) {
        UniPoly r = restrict_to_line(pr.factors[i], line.base(), dir);
        if (r.is_zero())
            throw LineInZeroSet("line_cell_crossings: line lies inside the zero set of factor " + std::to_string(i));
        product = product * r;
    }
    const std::size_t crossings = sturm_root_count(product) + 1;
    if (crossings > pr.product_degree + 1)
        throw InvariantViolation("line_cell_crossings: " + std::to_string(crossings) + " crossings exceed degree bound");
    return crossings;
}

ZeroSetSplit split_joints_by_zero_set(const JointSet& joints, const PartitionResult& pr) {
    ZeroSetSplit out;
    for (const auto& [x, rec] : joints) {
        if (auto sv = pr.classify(x)) out.buckets[*sv].push_back(x);
        else out.on_surface.push_back(x);
    }
    return out;
}

RecursionReport recursion_demo(std::span<const FlatFamily> families, std::size_t degree, const Rational& tolerance,
                               std::uint64_t seed, const BisectOptions& options) {
    for (const auto& f : families)
        if (f.flat_dim() != 1) throw PreconditionError("recursion_demo: every family must consist of lines");
    JointSet joints = find_joints(families);

    RecursionReport report;
    report.total = joints.size();
    std::vector<QVector> locations;
    for (const auto& [x, rec] : joints) locations.push_back(x);

    PartitionResult pr;
    pr.n = families.front().ambient_dim();
    if (!locations.empty()) pr = partition_points(locations, pr.n, degree, tolerance, seed, options);
    report.j = pr.j();
    report.product_degree = pr.product_degree;
    report.class_bound = pr.class_bound;
    report.factors = pr.factors;

    ZeroSetSplit split = split_joints_by_zero_set(joints, pr);
    std::size_t in_cells = 0;
    for (const auto& [sv, pts] : split.buckets) {
        report.in_cells[sv] = pts.size();
        in_cells += pts.size();
        report.max_class = std::max(report.max_class, pts.size());
    }
    report.on_surface = split.on_surface.size();
    report.conserved = in_cells + report.on_surface == report.total;

    report.vanishing_check = true;
    for (const auto& family : families) {
        FamilyTally tally;
        tally.lines = family.size();
        tally.bound = (degree + 1) * family.size();
        for (const auto& line : family) {
            const QVector dir = line.direction_rows().row(0);
            UniPoly restricted({Rational(1)});
            bool inside = false;
            for (const auto& f : pr.factors) {
                UniPoly r = restrict_to_line(f, line.base(), dir);
                if (r.is_zero()) {
                    inside = true;
                    break;
                }
                restricted = restricted * r;
            }
            if (inside) {
                ++tally.lines_in_zero_set;
                continue;
            }
            std::size_t on_line = 0;
            for (const auto& x : split.on_surface)
                if (line.contains_point(x)) ++on_line;
            // Distinct on-surface joints are distinct real roots of the restriction.
            const std::size_t roots = restricted.degree() > 0 ? sturm_root_count(restricted) : 0;
            if (on_line > roots || roots > pr.product_degree) report.vanishing_check = false;
            tally.incidences += on_line;
            tally.max_per_line = std::max(tally.max_per_line, on_line);
        }
        if (tally.incidences > tally.bound) report.vanishing_check = false;
        report.tallies.push_back(tally);
    }
    if (!report.conserved) throw InvariantViolation("recursion_demo: joint counts are not conserved");
    if (!report.vanishing_check) throw InvariantViolation("recursion_demo: vanishing-lemma incidence bound violated");
    return report;
}

}  // namespace jointlab
