#include "jointlab/generators.hpp"

#include <numeric>
#include <set>
#include <string>
#include <unordered_set>

#include "jointlab/errors.hpp"
#include "jointlab/random.hpp"

namespace jointlab {

namespace {

QVector unit(std::size_t n, std::size_t i) {
    QVector v(n);
    v[i] = 1;
    return v;
}

// Grid points of {0..side-1}^dims in lexicographic order.
std::vector<std::vector<std::size_t>> grid_points(std::size_t dims, std::size_t side) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> p(dims, 0);
    while (true) {
        out.push_back(p);
        std::size_t i = dims;
        while (true) {
            if (i == 0) return out;
            --i;
            if (++p[i] < side) break;
            p[i] = 0;
        }
    }
}

bool every_tuple_spans(const std::vector<std::vector<QVector>>& dirs, std::size_t n) {
    std::vector<std::size_t> pick(n, 0);
    std::vector<QVector> rows(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) rows[i] = dirs[i][pick[i]];
        if (rank(QMatrix::from_rows(rows, n)) != n) return false;
        std::size_t i = n;
        while (true) {
            if (i == 0) return true;
            --i;
            if (++pick[i] < dirs[i].size()) break;
            pick[i] = 0;
        }
    }
}

}  // namespace

std::vector<FlatFamily> grid_lines(std::size_t n, std::size_t side) {
    if (n < 2) throw PreconditionError("grid_lines: n must be at least 2");
    if (side < 1) throw PreconditionError("grid_lines: side must be at least 1");
    std::vector<std::size_t> ones(n, 1);
    return grid_flats(n, ones, side);
}

std::vector<FlatFamily> grid_flats(std::size_t k, std::span<const std::size_t> alphas, std::size_t side) {
    if (k < 2) throw PreconditionError("grid_flats: k must be at least 2");
    if (alphas.size() != k) throw PreconditionError("grid_flats: need one alpha per family");
    if (side < 1) throw PreconditionError("grid_flats: side must be at least 1");
    for (auto a : alphas)
        if (a < 1) throw PreconditionError("grid_flats: every alpha must be at least 1");
    const std::size_t n = std::accumulate(alphas.begin(), alphas.end(), std::size_t{0});

    std::vector<std::size_t> aux_offset(k);
    std::size_t offset = k;
    for (std::size_t i = 0; i < k; ++i) {
        aux_offset[i] = offset;
        offset += alphas[i] - 1;
    }

    const auto others = grid_points(k - 1, side);
    std::vector<FlatFamily> families;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<QVector> dirs{unit(n, i)};
        for (std::size_t a = 0; a + 1 < alphas[i]; ++a) dirs.push_back(unit(n, aux_offset[i] + a));
        std::vector<AffineFlat> members;
        members.reserve(others.size());
        for (const auto& g : others) {
            QVector base(n);
            for (std::size_t c = 0, j = 0; c < k; ++c) {
                if (c == i) continue;
                base[c] = Rational(static_cast<long>(g[j++]));
            }
            members.emplace_back(std::move(base), dirs);
        }
        families.emplace_back(n, alphas[i], std::move(members));
    }
    return families;
}

FlatFamily random_flats(std::size_t n, std::size_t alpha, std::size_t count, std::int64_t coord_bound,
                        std::uint64_t seed) {
    if (alpha >= n) throw PreconditionError("random_flats: alpha must be below the ambient dimension");
    if (count < 1) throw PreconditionError("random_flats: count must be at least 1");
    if (coord_bound < 1) throw PreconditionError("random_flats: coord_bound must be at least 1");
    Rng rng(seed);
    auto draw_vector = [&] {
        QVector v(n);
        for (auto& x : v) x = Rational(static_cast<long>(draw_int(rng, -coord_bound, coord_bound)));
        return v;
    };
    std::vector<AffineFlat> members;
    std::unordered_set<AffineFlat, AffineFlatHash> seen;
    const std::size_t budget = 100 * count + 1000;
    for (std::size_t draw = 0; draw < budget && members.size() < count; ++draw) {
        QVector base = draw_vector();
        std::vector<QVector> dirs;
        for (std::size_t a = 0; a < alpha; ++a) dirs.push_back(draw_vector());
        if (alpha > 0 && rank(QMatrix::from_rows(dirs, n)) != alpha) continue;
        AffineFlat f(std::move(base), dirs);
        if (seen.insert(f).second) members.push_back(std::move(f));
    }
    if (members.size() < count)
        throw SearchExhausted("random_flats: only " + std::to_string(members.size()) + " of " + std::to_string(count) +
                              " distinct flats found; raise coord_bound");
    return FlatFamily(n, alpha, std::move(members));
}

std::vector<FlatFamily> bush_config(std::size_t n, std::span<const std::size_t> multiplicities, std::uint64_t seed) {
    if (n < 2) throw PreconditionError("bush_config: n must be at least 2");
    if (multiplicities.size() != n) throw PreconditionError("bush_config: need one multiplicity per family");
    for (auto m : multiplicities)
        if (m < 1) throw PreconditionError("bush_config: every multiplicity must be at least 1");

    constexpr std::int64_t range = 8;
    constexpr std::size_t max_attempts = 200;
    Rng rng(seed);
    const QVector origin(n);
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<std::vector<QVector>> dirs(n);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            dirs[i].push_back(unit(n, i));
            std::set<AffineFlat> lines{AffineFlat(origin, {dirs[i][0]})};
            while (dirs[i].size() < multiplicities[i]) {
                QVector d(n);
                for (auto& x : d) x = Rational(static_cast<long>(draw_int(rng, -range, range)));
                if (is_zero(d)) continue;
                if (!lines.insert(AffineFlat(origin, {d})).second) {
                    ok = false;
                    break;
                }
                dirs[i].push_back(std::move(d));
            }
        }
        if (!ok || !every_tuple_spans(dirs, n)) continue;

        std::vector<FlatFamily> families;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<AffineFlat> members;
            for (const auto& d : dirs[i]) members.emplace_back(origin, std::vector<QVector>{d});
            families.emplace_back(n, 1, std::move(members));
        }
        return families;
    }
    throw SearchExhausted("bush_config: no spanning configuration found in " + std::to_string(max_attempts) +
                          " attempts");
}

}  // namespace jointlab
