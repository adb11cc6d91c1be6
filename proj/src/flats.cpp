#include "jointlab/flats.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <unordered_set>

#include "jointlab/errors.hpp"
#include "jointlab/random.hpp"

namespace jointlab {

AffineFlat::AffineFlat(QVector base, const std::vector<QVector>& directions) : base_(std::move(base)) {
    const std::size_t n = base_.size();
    for (const auto& d : directions)
        if (d.size() != n) throw PreconditionError("AffineFlat: direction length differs from ambient dimension");
    if (directions.size() > n) throw PreconditionError("AffineFlat: more directions than ambient dimension");

    RowEchelon e = reduced_row_echelon(QMatrix::from_rows(directions, n));
    if (e.pivots.size() != directions.size())
        throw PreconditionError("AffineFlat: direction vectors are linearly dependent");
    basis_ = std::move(e.rows);
    if (basis_.cols() != n) basis_ = QMatrix(0, n);
    pivots_ = std::move(e.pivots);

    for (std::size_t j = 0; j < pivots_.size(); ++j) {
        Rational f = base_[pivots_[j]];
        if (f.is_zero()) continue;
        for (std::size_t c = 0; c < n; ++c) base_[c] -= f * basis_(j, c);
    }

    normals_ = nullspace(basis_).transpose();
    if (normals_.cols() != n) normals_ = QMatrix(0, n);
    offsets_ = normals_ * base_;
}

std::vector<QVector> AffineFlat::direction_vectors() const {
    std::vector<QVector> v;
    for (std::size_t r = 0; r < basis_.rows(); ++r) v.push_back(basis_.row(r));
    return v;
}

bool AffineFlat::contains_point(const QVector& x) const {
    if (x.size() != ambient_dim())
        throw PreconditionError("contains_point: point has dimension " + std::to_string(x.size()) +
                                ", flat lives in dimension " + std::to_string(ambient_dim()));
    mpq_class acc;
    for (std::size_t r = 0; r < normals_.rows(); ++r) {
        acc = 0;
        for (std::size_t c = 0; c < x.size(); ++c)
            if (!normals_(r, c).is_zero()) acc += normals_(r, c).value() * x[c].value();
        if (acc != offsets_[r].value()) return false;
    }
    return true;
}

std::optional<AffineFlat> AffineFlat::mapped(const QMatrix& a, const QVector& c) const {
    if (a.cols() != ambient_dim() || a.rows() != c.size()) throw PreconditionError("AffineFlat::mapped: shape mismatch");
    std::vector<QVector> dirs;
    for (std::size_t r = 0; r < basis_.rows(); ++r) dirs.push_back(a * basis_.row(r));
    if (!dirs.empty() && rank(QMatrix::from_rows(dirs, a.rows())) != dirs.size()) return std::nullopt;
    return AffineFlat(a * base_ + c, dirs);
}

bool operator<(const AffineFlat& a, const AffineFlat& b) {
    if (a.ambient_dim() != b.ambient_dim()) return a.ambient_dim() < b.ambient_dim();
    if (a.dim() != b.dim()) return a.dim() < b.dim();
    for (std::size_t r = 0; r < a.dim(); ++r) {
        auto ra = a.basis_.row(r), rb = b.basis_.row(r);
        if (ra != rb) return ra < rb;
    }
    return a.base_ < b.base_;
}

std::size_t AffineFlat::hash() const {
    std::size_t h = QVectorHash{}(base_);
    for (std::size_t r = 0; r < basis_.rows(); ++r)
        h ^= QVectorHash{}(basis_.row(r)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

FlatFamily::FlatFamily(std::size_t ambient_dim, std::size_t flat_dim, std::vector<AffineFlat> members)
    : ambient_dim_(ambient_dim), flat_dim_(flat_dim), members_(std::move(members)) {
    if (flat_dim_ > ambient_dim_) throw PreconditionError("FlatFamily: flat dimension exceeds ambient dimension");
    std::unordered_set<AffineFlat, AffineFlatHash> seen;
    for (std::size_t i = 0; i < members_.size(); ++i) {
        const auto& m = members_[i];
        if (m.ambient_dim() != ambient_dim_ || m.dim() != flat_dim_)
            throw PreconditionError("FlatFamily: member " + std::to_string(i) + " has dimension " +
                                    std::to_string(m.dim()) + " in R^" + std::to_string(m.ambient_dim()) +
                                    ", expected " + std::to_string(flat_dim_) + " in R^" +
                                    std::to_string(ambient_dim_));
        if (!seen.insert(m).second)
            throw PreconditionError("FlatFamily: member " + std::to_string(i) + " duplicates an earlier member");
    }
}

namespace {

std::optional<AffineFlat> intersect_implicit(std::span<const AffineFlat* const> flats) {
    const std::size_t n = flats.front()->ambient_dim();
    QMatrix a(0, n);
    QVector b;
    for (const auto* f : flats) {
        if (f->ambient_dim() != n) throw PreconditionError("intersection: ambient dimension mismatch");
        a = a.vcat(f->normals());
        b.insert(b.end(), f->offsets().begin(), f->offsets().end());
    }
    SolutionSet s = solve_affine(a, b);
    if (s.kind == SolutionSet::Kind::empty) return std::nullopt;
    std::vector<QVector> dirs;
    for (std::size_t c = 0; c < s.kernel.cols(); ++c) dirs.push_back(s.kernel.column(c));
    return AffineFlat(std::move(s.base), dirs);
}

}  // namespace

std::optional<AffineFlat> flat_intersection(const AffineFlat& a, const AffineFlat& b) {
    const AffineFlat* pair[] = {&a, &b};
    return intersect_implicit(pair);
}

std::optional<AffineFlat> common_intersection(std::span<const AffineFlat* const> flats) {
    if (flats.empty()) throw PreconditionError("common_intersection: no flats");
    return intersect_implicit(flats);
}

std::size_t direction_rank(std::span<const AffineFlat* const> flats) {
    if (flats.empty()) return 0;
    const std::size_t n = flats.front()->ambient_dim();
    QMatrix m(0, n);
    for (const auto* f : flats) {
        if (f->ambient_dim() != n) throw PreconditionError("direction_rank: ambient dimension mismatch");
        m = m.vcat(f->direction_rows());
    }
    return rank(m);
}

bool directions_span(std::span<const AffineFlat* const> flats) {
    if (flats.empty()) throw PreconditionError("directions_span: no flats");
    const std::size_t n = flats.front()->ambient_dim();
    std::size_t total = 0;
    for (const auto* f : flats) total += f->dim();
    if (total != n)
        throw PreconditionError("directions_span: flat dimensions sum to " + std::to_string(total) +
                                ", ambient dimension is " + std::to_string(n));
    return direction_rank(flats) == n;
}

bool directions_span(std::span<const AffineFlat> flats) {
    std::vector<const AffineFlat*> ptrs;
    for (const auto& f : flats) ptrs.push_back(&f);
    return directions_span(std::span<const AffineFlat* const>(ptrs));
}

std::optional<AffineFlat> project_flat(const QMatrix& map, const AffineFlat& flat) {
    return flat.mapped(map, QVector(map.rows()));
}

bool projection_is_generic(const QMatrix& map, std::span<const AffineFlat> flats,
                           std::span<const QVector> guard_points) {
    for (const auto& f : flats)
        if (!project_flat(map, f)) return false;
    std::set<QVector> distinct(guard_points.begin(), guard_points.end());
    std::set<QVector> images;
    for (const auto& p : distinct) images.insert(map * p);
    return images.size() == distinct.size();
}

Projection generic_projection(std::span<const AffineFlat> flats, std::size_t target_dim, std::uint64_t seed,
                              std::span<const QVector> guard_points, const ProjectionOptions& options) {
    std::size_t n = 0;
    if (!flats.empty()) n = flats.front().ambient_dim();
    else if (!guard_points.empty()) n = guard_points.front().size();
    else throw PreconditionError("generic_projection: nothing to project");
    if (target_dim >= n) throw PreconditionError("generic_projection: target dimension must be below ambient dimension");
    for (const auto& f : flats)
        if (f.ambient_dim() != n) throw PreconditionError("generic_projection: ambient dimension mismatch");
    for (const auto& p : guard_points)
        if (p.size() != n) throw PreconditionError("generic_projection: guard point dimension mismatch");
    if (options.coefficient_range < 1) throw PreconditionError("generic_projection: coefficient range must be >= 1");

    Rng rng(seed);
    std::int64_t range = options.coefficient_range;
    constexpr std::int64_t max_range = std::int64_t{1} << 40;
    for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
        QMatrix map;
        if (attempt == 0 && options.first_map) {
            map = *options.first_map;
            if (map.rows() != target_dim || map.cols() != n)
                throw PreconditionError("generic_projection: first_map has the wrong shape");
        } else {
            map = QMatrix(target_dim, n);
            for (std::size_t r = 0; r < target_dim; ++r)
                for (std::size_t c = 0; c < n; ++c) map(r, c) = Rational(static_cast<long>(draw_int(rng, -range, range)));
            range = std::min(range * 2, max_range);
        }
        if (!projection_is_generic(map, flats, guard_points)) continue;

        Projection out;
        out.map = map;
        for (const auto& f : flats) out.images.push_back(*project_flat(map, f));
        for (const auto& p : guard_points) out.guard_images.push_back(map * p);
        out.attempts = attempt + 1;
        return out;
    }
    throw SearchExhausted("generic_projection: no generic map found in " + std::to_string(options.max_attempts) +
                          " attempts; widen the coefficient range");
}

}  // namespace jointlab
