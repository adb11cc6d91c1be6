#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "jointlab/linalg.hpp"

namespace jointlab {

/// An affine flat {base + D s} in Q^n with a full-column-rank direction
/// matrix D (n x dim). Stored canonically: the direction space by its
/// reduced row echelon basis, and the base point reduced modulo that space
/// (zero in every pivot coordinate). Two flats are equal iff they are the
/// same point set. dim == 0 is a point.
class AffineFlat {
public:
    AffineFlat() = default;
    /// Throws PreconditionError if the directions are dependent or sized wrong.
    AffineFlat(QVector base, const std::vector<QVector>& directions);
    static AffineFlat point(QVector p) { return AffineFlat(std::move(p), {}); }

    std::size_t ambient_dim() const { return base_.size(); }
    std::size_t dim() const { return basis_.rows(); }
    const QVector& base() const { return base_; }
    /// n x dim matrix whose columns are the canonical direction basis.
    QMatrix directions() const { return basis_.transpose(); }
    /// Canonical direction basis, one vector per row.
    const QMatrix& direction_rows() const { return basis_; }
    std::vector<QVector> direction_vectors() const;
    /// Implicit form: the flat is {x : normals() x = offsets()}.
    const QMatrix& normals() const { return normals_; }
    const QVector& offsets() const { return offsets_; }

    /// Throws PreconditionError on dimension mismatch.
    bool contains_point(const QVector& x) const;

    /// Image under x -> A x + c, or nullopt if A collapses the direction space.
    std::optional<AffineFlat> mapped(const QMatrix& a, const QVector& c) const;

    friend bool operator==(const AffineFlat& a, const AffineFlat& b) {
        return a.base_ == b.base_ && a.basis_ == b.basis_;
    }
    friend bool operator<(const AffineFlat& a, const AffineFlat& b);

    std::size_t hash() const;

private:
    QVector base_;
    QMatrix basis_;
    std::vector<std::size_t> pivots_;
    QMatrix normals_;
    QVector offsets_;
};

struct AffineFlatHash {
    std::size_t operator()(const AffineFlat& f) const { return f.hash(); }
};

/// Members share ambient and flat dimension and are pairwise distinct.
class FlatFamily {
public:
    FlatFamily() = default;
    /// Throws PreconditionError on mixed dimensions or duplicate members.
    FlatFamily(std::size_t ambient_dim, std::size_t flat_dim, std::vector<AffineFlat> members);

    std::size_t ambient_dim() const { return ambient_dim_; }
    std::size_t flat_dim() const { return flat_dim_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const AffineFlat& operator[](std::size_t i) const { return members_[i]; }
    const std::vector<AffineFlat>& members() const { return members_; }
    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

    friend bool operator==(const FlatFamily&, const FlatFamily&) = default;

private:
    std::size_t ambient_dim_ = 0;
    std::size_t flat_dim_ = 0;
    std::vector<AffineFlat> members_;
};

/// Exact intersection of two flats: nullopt when empty, a dim-0 flat for a point.
std::optional<AffineFlat> flat_intersection(const AffineFlat& a, const AffineFlat& b);

/// Common intersection of any number (>= 1) of flats.
std::optional<AffineFlat> common_intersection(std::span<const AffineFlat* const> flats);

/// Rank of the concatenated direction bases.
std::size_t direction_rank(std::span<const AffineFlat* const> flats);

/// True iff the direction spaces together span Q^n. Requires the flat
/// dimensions to sum to n (PreconditionError otherwise), so a true result
/// means the direction spaces form a direct sum.
bool directions_span(std::span<const AffineFlat* const> flats);
bool directions_span(std::span<const AffineFlat> flats);

struct ProjectionOptions {
    std::int64_t coefficient_range = 1000;  ///< entries drawn from [-R, R]; R doubles per redraw
    std::size_t max_attempts = 24;
    std::optional<QMatrix> first_map;       ///< tried before any random draw
};

struct Projection {
    QMatrix map;                        ///< target_dim x n
    std::vector<AffineFlat> images;     ///< one per input flat, same order
    std::vector<QVector> guard_images;  ///< one per guard point, same order
    std::size_t attempts = 0;
};

/// Image of a flat under a linear map, or nullopt if its dimension drops.
std::optional<AffineFlat> project_flat(const QMatrix& map, const AffineFlat& flat);

/// Whether `map` keeps every flat's dimension and separates the distinct guard points.
bool projection_is_generic(const QMatrix& map, std::span<const AffineFlat> flats,
                           std::span<const QVector> guard_points);

/// Draws seeded random integer maps Q^n -> Q^target_dim until one is
/// generic for the given flats and guard points. Throws SearchExhausted
/// when the retry budget runs out.
Projection generic_projection(std::span<const AffineFlat> flats, std::size_t target_dim, std::uint64_t seed,
                              std::span<const QVector> guard_points, const ProjectionOptions& options = {});

}  // namespace jointlab
