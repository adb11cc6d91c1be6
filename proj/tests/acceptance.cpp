// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "jointlab/errors.hpp"
#include "jointlab/generators.hpp"
#include "jointlab/harness.hpp"
#include "jointlab/joints.hpp"
#include "jointlab/partition.hpp"
#include "jointlab/random.hpp"
#include "oracles.hpp"

using namespace jointlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects failures; keeps the first few messages.
struct Tally {
    std::size_t checks = 0, failures = 0;
    std::string first;
    void expect(bool ok, const std::string& what) {
        ++checks;
        if (ok) return;
        if (failures++ == 0) first = what;
    }
    Outcome outcome(std::string detail) const {
        if (failures) detail += "; " + std::to_string(failures) + " failed checks, first: " + first;
        return {failures == 0, detail};
    }
};

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::size_t cube(std::size_t s) { return s * s * s; }

Outcome extremal_lines() {
    Tally t;
    double s10 = 0;
    for (std::size_t s = 1; s <= 10; ++s) {
        auto start = Clock::now();
        auto families = grid_lines(3, s);
        auto js = find_joints(families);
        bool transversal = is_transversal(families).transversal;
        if (s == 10) s10 = seconds_since(start);
        t.expect(js.size() == cube(s), "S=" + std::to_string(s) + " count " + std::to_string(js.size()));
        bool ones = true;
        for (const auto& [x, rec] : js) ones = ones && rec.multiplicities == std::vector<std::size_t>{1, 1, 1};
        t.expect(ones, "S=" + std::to_string(s) + " multiplicity above 1");
        t.expect(transversal, "S=" + std::to_string(s) + " not transversal");
    }
    t.expect(s10 < 60.0, "S=10 took " + fmt(s10) + " s");
    // the full 10^6-triple scan at S=10 must meet the same target and agree
    auto start = Clock::now();
    auto families = grid_lines(3, 10);
    JointOptions naive{MultiplicityConvention::spanning_witness, JointStrategy::naive};
    auto scanned = find_joints(families, naive);
    double naive_s = seconds_since(start);
    t.expect(scanned == find_joints(families), "naive scan disagrees at S=10");
    t.expect(naive_s < 60.0, "naive S=10 took " + fmt(naive_s) + " s");
    return t.outcome("S=1..10 give S^3 joints, N_i=1, transversal; S=10 in " + fmt(s10, 2) + " s (full triple scan " +
                     fmt(naive_s, 2) + " s)");
}

Outcome extremal_planes() {
    Tally t;
    const std::vector<std::size_t> alphas = {2, 2, 2};
    for (std::size_t s = 1; s <= 8; ++s) {
        auto families = grid_flats(3, alphas, s);
        auto js = find_joints(families);
        t.expect(js.size() == cube(s), "S=" + std::to_string(s) + " count " + std::to_string(js.size()));
        for (const auto& [x, rec] : js) {
            std::vector<const AffineFlat*> chosen;
            for (std::size_t i = 0; i < 3; ++i) {
                const auto& plane = families[i][rec.witness[i]];
                t.expect(plane.contains_point(x), "witness plane misses " + to_string(x));
                chosen.push_back(&plane);
            }
            t.expect(directions_span(chosen), "witness planes do not span at " + to_string(x));
            auto meet = common_intersection(chosen);
            t.expect(meet && meet->dim() == 0 && meet->base() == x, "witness planes do not meet in " + to_string(x));
        }
    }
    return t.outcome("S=1..8 give S^3 joints, every witness triple meets and spans Q^6");
}

Outcome exponent_fits() {
    Tally t;
    auto start = Clock::now();
    ExperimentConfig lines;
    lines.kind = ExperimentKind::grid_lines;
    for (std::size_t s = 4; s <= 16; ++s) lines.ladder.push_back(s);
    auto line_rows = run_experiment(lines);
    for (std::size_t i = 0; i < line_rows.size(); ++i)
        t.expect(line_rows[i].error.empty() && line_rows[i].joints == cube(lines.ladder[i]),
                 "grid_lines row " + line_rows[i].params);
    auto fl = fit_exponent(line_rows, "total_size", "joints");
    t.expect(fl.slope >= 1.40 && fl.slope <= 1.60, "lines slope " + fmt(fl.slope));

    ExperimentConfig planes;
    planes.kind = ExperimentKind::grid_flats;
    planes.alphas = {2, 2, 2};
    for (std::size_t s = 4; s <= 16; ++s) planes.ladder.push_back(s);
    auto plane_rows = run_experiment(planes);
    for (const auto& r : plane_rows) t.expect(r.error.empty(), "grid_flats row " + r.params + ": " + r.error);
    auto fp = fit_exponent(plane_rows, "size_product", "joints");
    t.expect(fp.slope >= 0.49 && fp.slope <= 0.51, "flats slope " + fmt(fp.slope));

    double elapsed = seconds_since(start);
    t.expect(elapsed < 300.0, "took " + fmt(elapsed, 1) + " s");
    return t.outcome("J vs N slope " + fmt(fl.slope) + " (window [1.40,1.60]); J vs prod|S_i| slope " + fmt(fp.slope) +
                     " (window [0.49,0.51]); " + fmt(elapsed, 2) + " s");
}

Outcome oracle_equivalence() {
    Tally t;
    std::size_t joints = 0, nonempty = 0, max_lines = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(mix_seed(seed, 1000));
        std::vector<FlatFamily> families;
        std::size_t total = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            std::size_t count = static_cast<std::size_t>(draw_int(rng, 1, 10));
            total += count;
            families.push_back(random_flats(3, 1, count, 1 + static_cast<std::int64_t>(seed % 2), mix_seed(seed, i)));
        }
        max_lines = std::max(max_lines, total);
        t.expect(total <= 30, "configuration with " + std::to_string(total) + " lines");
        JointOptions naive{MultiplicityConvention::spanning_witness, JointStrategy::naive};
        auto fast = find_joints(families);
        auto slow = find_joints(families, naive);
        t.expect(fast == slow, "seed " + std::to_string(seed) + ": " + std::to_string(fast.size()) + " vs " +
                                   std::to_string(slow.size()));
        JointOptions naive_all{MultiplicityConvention::all_members, JointStrategy::naive};
        JointOptions fast_all{MultiplicityConvention::all_members, JointStrategy::accelerated};
        t.expect(find_joints(families, fast_all) == find_joints(families, naive_all),
                 "seed " + std::to_string(seed) + " all-members convention");
        joints += slow.size();
        nonempty += !slow.empty();
    }
    return t.outcome("200 configurations (max " + std::to_string(max_lines) + " lines), " + std::to_string(joints) +
                     " joints in " + std::to_string(nonempty) + " configurations with joints");
}

QMatrix random_invertible(Rng& rng, std::size_t n) {
    while (true) {
        QMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = Rational(draw_int(rng, -4, 4), draw_int(rng, 1, 3));
        if (rank(a) == n) return a;
    }
}

Outcome invariance() {
    Tally t;
    std::size_t joints = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        std::vector<FlatFamily> families;
        if (seed % 5 == 4) {  // a line family and a plane family in Q^3
            families = {random_flats(3, 1, 6, 1, mix_seed(seed, 0)), random_flats(3, 2, 6, 1, mix_seed(seed, 1))};
        } else {
            for (std::size_t i = 0; i < 3; ++i) families.push_back(random_flats(3, 1, 6, 1, mix_seed(seed, i)));
        }
        auto base = find_joints(families);
        joints += base.size();
        Rng rng(mix_seed(seed, 77));
        for (int m = 0; m < 10; ++m) {
            QMatrix a = random_invertible(rng, 3);
            QVector c(3);
            for (auto& x : c) x = Rational(draw_int(rng, -5, 5), draw_int(rng, 1, 4));
            std::vector<FlatFamily> mapped;
            for (const auto& f : families) {
                std::vector<AffineFlat> members;
                for (const auto& flat : f) members.push_back(*flat.mapped(a, c));
                mapped.emplace_back(3, f.flat_dim(), std::move(members));
            }
            auto js = find_joints(mapped);
            bool ok = js.size() == base.size();
            for (const auto& [x, rec] : base) {
                auto it = js.records.find(a * x + c);
                ok = ok && it != js.records.end() && it->second.multiplicities == rec.multiplicities;
            }
            t.expect(ok, "seed " + std::to_string(seed) + " map " + std::to_string(m));
        }
        std::vector<std::size_t> perm(families.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (i + 1) % perm.size();
        std::vector<FlatFamily> permuted;
        for (auto p : perm) permuted.push_back(families[p]);
        auto js = find_joints(permuted);
        bool ok = js.size() == base.size();
        for (const auto& [x, rec] : base) {
            auto it = js.records.find(x);
            if (it == js.records.end()) {
                ok = false;
                continue;
            }
            for (std::size_t i = 0; i < perm.size(); ++i)
                ok = ok && it->second.multiplicities[i] == rec.multiplicities[perm[i]];
        }
        t.expect(ok, "seed " + std::to_string(seed) + " family permutation");
    }
    return t.outcome("50 configurations x 10 affine maps plus a family permutation, " + std::to_string(joints) +
                     " joints tracked");
}

std::vector<QVector> unit_cube_points(std::size_t count, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<QVector> pts(count, QVector(n));
    for (auto& p : pts)
        for (auto& x : p) x = Rational(draw_int(rng, 0, 1000), 1000);
    return pts;
}

// ceil(total * (11/20)^j) with plain mpz arithmetic.
std::size_t tenth_bound(std::size_t total, std::size_t j) {
    mpz_class num = static_cast<unsigned long>(total), den = 1;
    for (std::size_t i = 0; i < j; ++i) {
        num *= 11;
        den *= 20;
    }
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return c.get_ui();
}

Outcome partition_verification() {
    Tally t;
    const std::size_t sizes[] = {100, 250, 500, 750, 1000, 1500, 2000, 2500, 3000, 5000};
    std::size_t worst_ratio_class = 0, worst_ratio_bound = 1, max_j = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        std::size_t count = sizes[i % 10];
        std::size_t n = 2 + i % 2;
        std::size_t degree = 4 + i % 5;
        auto pts = unit_cube_points(count, n, mix_seed(i, 6));
        std::string tag = "|S|=" + std::to_string(count) + " n=" + std::to_string(n) + " D=" + std::to_string(degree);
        PartitionResult pr;
        try {
            pr = partition_points(pts, n, degree, Rational(1, 10), i);
        } catch (const std::exception& e) {
            t.expect(false, tag + ": " + e.what());
            continue;
        }
        std::map<std::string, std::size_t> classes;
        std::size_t on_surface = 0;
        for (const auto& p : pts) {
            std::string s;
            bool zero = false;
            for (const auto& f : pr.factors) {
                int sg = sgn(oracle::q(f.evaluate(p)));
                zero = zero || sg == 0;
                s += sg > 0 ? '+' : '-';
            }
            if (zero) ++on_surface;
            else ++classes[s];
        }
        std::size_t bound = tenth_bound(count, pr.j());
        std::size_t sum = on_surface;
        for (const auto& [s, c] : classes) {
            sum += c;
            t.expect(c <= bound, tag + " class " + s + " holds " + std::to_string(c) + " > " + std::to_string(bound));
            if (c * worst_ratio_bound > worst_ratio_class * bound) {
                worst_ratio_class = c;
                worst_ratio_bound = bound;
            }
        }
        t.expect(sum == count, tag + " conservation");
        t.expect(on_surface == pr.zero_set_points.size(), tag + " zero set size");
        t.expect(pr.class_bound == bound, tag + " reported bound");
        t.expect(pr.product_degree <= degree, tag + " degree budget");
        max_j = std::max(max_j, pr.j());
    }
    return t.outcome("20 point sets, j up to " + std::to_string(max_j) + ", fullest class " +
                     std::to_string(worst_ratio_class) + "/" + std::to_string(worst_ratio_bound) + " of its bound");
}

Outcome crossing_bound() {
    Tally t;
    std::size_t pairs = 0, in_zero_set = 0, max_cross = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        std::size_t n = 2 + i % 2;
        auto pts = unit_cube_points(200 + 20 * i, n, mix_seed(i, 7));
        auto pr = partition_points(pts, n, 3 + i % 6, Rational(1, 10), i);
        MultiPoly product = pr.product();
        Rng rng(mix_seed(i, 8));
        for (int k = 0; k < 50; ++k, ++pairs) {
            QVector base(n), dir(n);
            // half the lines pass through an input point, half are generic
            if (k % 2 == 0) base = pts[static_cast<std::size_t>(draw_int(rng, 0, static_cast<std::int64_t>(pts.size()) - 1))];
            else
                for (auto& x : base) x = Rational(draw_int(rng, -500, 1500), 1000);
            do {
                for (auto& x : dir) x = Rational(draw_int(rng, -9, 9));
            } while (is_zero(dir));
            AffineFlat line(base, {dir});
            try {
                std::size_t c = line_cell_crossings(pr, line);
                max_cross = std::max(max_cross, c);
                t.expect(c <= pr.product_degree + 1, "crossings above degree + 1");
                auto restricted = oracle::poly_of(restrict_to_line(product, line.base(), line.direction_vectors()[0]));
                t.expect(c == oracle::root_count(restricted, std::nullopt, std::nullopt) + 1,
                         "crossings disagree with root isolation");
            } catch (const LineInZeroSet&) {
                ++in_zero_set;
            } catch (const InvariantViolation& e) {
                t.expect(false, e.what());
            }
        }
    }
    Rng rng(99);
    std::size_t roots = 0;
    for (int k = 0; k < 500; ++k) {
        std::size_t deg = static_cast<std::size_t>(draw_int(rng, 0, 10));
        std::vector<Rational> c(deg + 1);
        for (auto& x : c) x = Rational(draw_int(rng, -20, 20), draw_int(rng, 1, 5));
        if (k % 3 == 0) {  // build in repeated rational roots
            UniPoly p({Rational(1)});
            for (std::size_t r = 0; r < deg; ++r) p = p * UniPoly({Rational(draw_int(rng, -3, 3), 2), Rational(1)});
            c = p.coeffs();
        }
        if (c.back().is_zero()) c.back() = Rational(1);
        UniPoly q(c);
        std::size_t all = sturm_root_count(q);
        roots += all;
        t.expect(all == oracle::root_count(oracle::poly_of(q), std::nullopt, std::nullopt),
                 "Sturm vs oracle on " + q.str());
        Rational lo(draw_int(rng, -12, 12), 4), hi = lo + Rational(draw_int(rng, 1, 16), 4);
        t.expect(sturm_root_count(q, lo, hi) == oracle::root_count(oracle::poly_of(q), lo.value(), hi.value()),
                 "Sturm vs oracle on " + q.str() + " over (" + lo.str() + ", " + hi.str() + "]");
    }
    t.expect(pairs - in_zero_set >= 1000 * 9 / 10, "too many lines inside the zero set");
    return t.outcome(std::to_string(pairs) + " pairs (" + std::to_string(in_zero_set) +
                     " lines inside a zero set), max crossings " + std::to_string(max_cross) +
                     "; 500 polynomials with " + std::to_string(roots) + " real roots agree with root isolation");
}

Outcome carbery_quantities() {
    Tally t;
    const std::vector<std::pair<std::vector<std::size_t>, double>> cases = {
        {{2, 1, 1}, std::sqrt(2.0)}, {{4, 2, 1}, std::sqrt(8.0)}, {{3, 3, 3}, std::sqrt(27.0)}};
    std::string values;
    for (const auto& [m, expect] : cases) {
        auto js = find_joints(bush_config(3, m, 1));
        auto cs = carbery_sum(js, 3);
        t.expect(js.size() == 1 && js.begin()->second.multiplicities == m, "bush joint multiplicities");
        t.expect(std::abs(cs.value - expect) <= 1e-9 * expect, "bush sum " + fmt(cs.value, 12));
        values += (values.empty() ? "" : ", ") + fmt(cs.value, 10);
    }
    for (std::size_t s = 1; s <= 10; ++s) {
        auto cs = carbery_sum(find_joints(grid_lines(3, s)), 3);
        t.expect(cs.value == static_cast<double>(cube(s)), "grid S=" + std::to_string(s) + " sum " + fmt(cs.value, 6));
    }
    return t.outcome("bush sums " + values + "; grid sums equal S^3 exactly for S=1..10");
}

Outcome recursion_conservation() {
    Tally t;
    std::size_t max_incidence = 0;
    for (std::size_t s = 2; s <= 6; ++s)
        for (std::size_t degree = 2; degree <= 6; ++degree) {
            std::string tag = "S=" + std::to_string(s) + " D=" + std::to_string(degree);
            auto families = grid_lines(3, s);
            try {
                auto rep = recursion_demo(families, degree, Rational(1, 10), s * 10 + degree);
                std::size_t sum = rep.on_surface;
                for (const auto& [sv, c] : rep.in_cells) sum += c;
                t.expect(sum == cube(s) && rep.total == cube(s), tag + " conservation");
                for (std::size_t i = 0; i < 3; ++i) {
                    const auto& tally = rep.tallies[i];
                    t.expect(tally.incidences <= (degree + 1) * families[i].size(), tag + " vanishing tally");
                    max_incidence = std::max(max_incidence, tally.incidences);
                }
            } catch (const std::exception& e) {
                t.expect(false, tag + ": " + e.what());
            }
        }
    return t.outcome("25 (S, D) pairs conserve S^3 joints; largest family incidence tally " +
                     std::to_string(max_incidence));
}

std::vector<ExperimentConfig> experiment_suite() {
    std::vector<ExperimentConfig> suite;
    auto add = [&](ExperimentKind kind, std::vector<std::size_t> ladder, std::vector<std::uint64_t> seeds) {
        ExperimentConfig c;
        c.kind = kind;
        c.ladder = std::move(ladder);
        c.seeds = std::move(seeds);
        suite.push_back(c);
        return &suite.back();
    };
    add(ExperimentKind::grid_lines, {2, 3, 4, 5, 6, 8}, {0});
    add(ExperimentKind::grid_flats, {2, 3, 4, 5}, {0})->alphas = {2, 2, 2};
    add(ExperimentKind::bush, {1, 2, 3}, {1, 2})->multiplicities = {2, 1, 1};
    {
        auto* c = add(ExperimentKind::random, {4, 8, 12}, {1, 2, 3});
        c->alphas = {1, 1, 1};
        c->coord_bound = 1;
    }
    {
        auto* c = add(ExperimentKind::partition, {200, 500, 1000}, {1, 2});
        c->n = 2;
        c->degree = 6;
    }
    add(ExperimentKind::recursion_demo, {2, 3, 4}, {5})->degree = 4;
    return suite;
}

Outcome determinism() {
    Tally t;
    auto run_suite = [] {
        std::vector<ResultRow> all;
        for (const auto& cfg : experiment_suite()) {
            auto rows = run_experiment(cfg);
            all.insert(all.end(), rows.begin(), rows.end());
        }
        return format_csv(all, {false});
    };
    std::string first = run_suite(), second = run_suite();
    t.expect(first == second, "CSV differs between runs");
    std::size_t lines = static_cast<std::size_t>(std::count(first.begin(), first.end(), '\n'));
    t.expect(first.find(";error=") == std::string::npos, "a suite row failed");
    return t.outcome(std::to_string(lines - 1) + " rows over 6 experiment kinds, " + std::to_string(first.size()) +
                     " bytes, identical on re-run");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"extremal exactness, lines", extremal_lines},
        {"extremal exactness, 2-planes in Q^6", extremal_planes},
        {"exponent fits", exponent_fits},
        {"oracle equivalence", oracle_equivalence},
        {"affine and permutation invariance", invariance},
        {"partition verification", partition_verification},
        {"crossing bound", crossing_bound},
        {"Carbery quantities", carbery_quantities},
        {"recursion demo conservation", recursion_conservation},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), seconds_since(start));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
