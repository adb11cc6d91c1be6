#include "jointlab/joints.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "jointlab/errors.hpp"

namespace jointlab {

namespace {

void validate_families(std::span<const FlatFamily> families) {
    if (families.size() < 2) throw PreconditionError("find_joints: need at least two families");
    const std::size_t n = families.front().ambient_dim();
    std::size_t total = 0;
    for (std::size_t i = 0; i < families.size(); ++i) {
        const auto& f = families[i];
        if (f.empty()) throw PreconditionError("find_joints: family " + std::to_string(i) + " is empty");
        if (f.ambient_dim() != n) throw PreconditionError("find_joints: families live in different ambient dimensions");
        if (f.flat_dim() == 0 || f.flat_dim() >= n)
            throw PreconditionError("find_joints: family " + std::to_string(i) + " has flat dimension " +
                                    std::to_string(f.flat_dim()) + ", must lie in [1, " + std::to_string(n) + ")");
        total += f.flat_dim();
    }
    if (total != n)
        throw PreconditionError("find_joints: flat dimensions sum to " + std::to_string(total) +
                                ", ambient dimension is " + std::to_string(n));
}

// Per-location accumulator used by both scan strategies.
struct Accumulator {
    std::vector<std::set<std::size_t>> participants;
    std::vector<std::size_t> witness;
};

void note_spanning_tuple(std::map<QVector, Accumulator>& acc, const QVector& x, const std::vector<std::size_t>& tuple) {
    auto [it, inserted] = acc.try_emplace(x);
    auto& a = it->second;
    if (inserted) {
        a.participants.resize(tuple.size());
        a.witness = tuple;
    } else if (tuple < a.witness) {
        a.witness = tuple;
    }
    for (std::size_t i = 0; i < tuple.size(); ++i) a.participants[i].insert(tuple[i]);
}

JointSet finalize(std::map<QVector, Accumulator>& acc, std::span<const FlatFamily> families,
                  MultiplicityConvention convention) {
    JointSet out;
    for (auto& [x, a] : acc) {
        JointRecord rec;
        rec.location = x;
        rec.witness = std::move(a.witness);
        for (std::size_t i = 0; i < families.size(); ++i) {
            if (convention == MultiplicityConvention::spanning_witness) {
                rec.multiplicities.push_back(a.participants[i].size());
            } else {
                std::size_t count = 0;
                for (const auto& f : families[i])
                    if (f.contains_point(x)) ++count;
                rec.multiplicities.push_back(count);
            }
        }
        out.records.emplace(x, std::move(rec));
    }
    return out;
}

// Advances a mixed-radix counter; false once it wraps.
bool next_tuple(std::vector<std::size_t>& t, const std::vector<std::size_t>& radix) {
    for (std::size_t i = t.size(); i-- > 0;) {
        if (++t[i] < radix[i]) return true;
        t[i] = 0;
    }
    return false;
}

std::map<QVector, Accumulator> scan_naive(std::span<const FlatFamily> families) {
    std::map<QVector, Accumulator> acc;
    const std::size_t k = families.size();
    std::vector<std::size_t> radix(k), tuple(k, 0);
    for (std::size_t i = 0; i < k; ++i) radix[i] = families[i].size();
    std::vector<const AffineFlat*> chosen(k);
    do {
        for (std::size_t i = 0; i < k; ++i) chosen[i] = &families[i][tuple[i]];
        if (!directions_span(chosen)) continue;
        auto meet = common_intersection(chosen);
        if (!meet) continue;
        if (meet->dim() != 0) throw InvariantViolation("find_joints: spanning tuple met in a positive-dimensional flat");
        note_spanning_tuple(acc, meet->base(), tuple);
    } while (next_tuple(tuple, radix));
    return acc;
}

std::map<QVector, Accumulator> scan_accelerated(std::span<const FlatFamily> families) {
    const std::size_t k = families.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return families[a].size() < families[b].size(); });
    const FlatFamily& fa = families[order[0]];
    const FlatFamily& fb = families[order[1]];
    const std::size_t pair_dim = fa.flat_dim() + fb.flat_dim();

    // Any spanning tuple contains a pair from (fa, fb) with independent
    // directions, and such a pair meets in at most one point.
    std::set<QVector> candidates;
    for (const auto& a : fa)
        for (const auto& b : fb) {
            const AffineFlat* pair[] = {&a, &b};
            if (direction_rank(pair) != pair_dim) continue;
            if (auto meet = flat_intersection(a, b)) candidates.insert(meet->base());
        }

    std::map<QVector, Accumulator> acc;
    std::vector<std::vector<std::size_t>> through(k);
    std::vector<const AffineFlat*> chosen(k);
    for (const auto& x : candidates) {
        bool all_present = true;
        for (std::size_t i = 0; i < k && all_present; ++i) {
            through[i].clear();
            for (std::size_t m = 0; m < families[i].size(); ++m)
                if (families[i][m].contains_point(x)) through[i].push_back(m);
            all_present = !through[i].empty();
        }
        if (!all_present) continue;

        std::vector<std::size_t> radix(k), pos(k, 0), tuple(k);
        for (std::size_t i = 0; i < k; ++i) radix[i] = through[i].size();
        do {
            for (std::size_t i = 0; i < k; ++i) {
                tuple[i] = through[i][pos[i]];
                chosen[i] = &families[i][tuple[i]];
            }
            if (directions_span(chosen)) note_spanning_tuple(acc, x, tuple);
        } while (next_tuple(pos, radix));
    }
    return acc;
}

}  // namespace

JointSet find_joints(std::span<const FlatFamily> families, const JointOptions& options) {
    validate_families(families);
    auto acc = options.strategy == JointStrategy::naive ? scan_naive(families) : scan_accelerated(families);
    return finalize(acc, families, options.multiplicity);
}

JointSet find_joints_same_set(const FlatFamily& lines, std::size_t n, const JointOptions& options) {
    if (lines.flat_dim() != 1) throw PreconditionError("find_joints_same_set: members must be lines");
    if (lines.ambient_dim() != n)
        throw PreconditionError("find_joints_same_set: lines live in R^" + std::to_string(lines.ambient_dim()) +
                                ", not R^" + std::to_string(n));
    std::vector<FlatFamily> copies(n, lines);
    return find_joints(copies, options);
}

CarberySum carbery_sum(const JointSet& joints, std::size_t n) {
    if (n < 2) throw PreconditionError("carbery_sum: n must be at least 2");
    CarberySum out;
    const unsigned root = static_cast<unsigned>(n - 1);
    for (const auto& [x, rec] : joints) {
        if (rec.multiplicities.size() != n)
            throw PreconditionError("carbery_sum: record has " + std::to_string(rec.multiplicities.size()) +
                                    " multiplicities, expected " + std::to_string(n));
        mpz_class product = 1;
        for (auto m : rec.multiplicities) product *= static_cast<unsigned long>(m);
        const double p = product.get_d();
        double term = 0.0;
        switch (root) {
            case 1: term = p; break;
            case 2: term = std::sqrt(p); break;
            case 3: term = std::cbrt(p); break;
            default: term = std::pow(p, 1.0 / static_cast<double>(root)); break;
        }
        out.value += term;
    }
    out.error_bound = static_cast<double>(joints.size()) * 0x1.0p-45 * out.value;
    return out;
}

namespace {

struct TransversalSearch {
    std::span<const FlatFamily> families;
    std::vector<std::size_t> tuple;
    std::vector<const AffineFlat*> chosen;
    TransversalityReport report;

    bool visit(std::size_t i, const AffineFlat& meet) {
        if (i == families.size()) {
            if (directions_span(chosen)) return false;
            report.transversal = false;
            report.counterexample = tuple;
            report.meeting_point = meet.base();
            return true;
        }
        for (std::size_t m = 0; m < families[i].size(); ++m) {
            const AffineFlat& line = families[i][m];
            tuple[i] = m;
            chosen[i] = &line;
            if (meet.dim() == 0) {
                if (line.contains_point(meet.base()) && visit(i + 1, meet)) return true;
            } else if (auto next = flat_intersection(meet, line)) {
                if (visit(i + 1, *next)) return true;
            }
        }
        return false;
    }
};

}  // namespace

TransversalityReport is_transversal(std::span<const FlatFamily> families) {
    if (families.empty()) throw PreconditionError("is_transversal: no families");
    const std::size_t n = families.front().ambient_dim();
    if (families.size() != n)
        throw PreconditionError("is_transversal: need exactly n = " + std::to_string(n) + " families");
    for (const auto& f : families)
        if (f.ambient_dim() != n || f.flat_dim() != 1)
            throw PreconditionError("is_transversal: every family must consist of lines in R^" + std::to_string(n));

    TransversalSearch search{families, std::vector<std::size_t>(n), std::vector<const AffineFlat*>(n), {}};
    for (std::size_t m = 0; m < families[0].size(); ++m) {
        search.tuple[0] = m;
        search.chosen[0] = &families[0][m];
        if (search.visit(1, families[0][m])) break;
    }
    return search.report;
}

}  // namespace jointlab
