#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jointlab/flats.hpp"
#include "jointlab/joints.hpp"
#include "jointlab/poly.hpp"

namespace jointlab {

/// Sign pattern of a point under the partition factors, one '+' or '-' per factor.
struct SignVector {
    std::string signs;
    std::size_t size() const { return signs.size(); }
    friend auto operator<=>(const SignVector&, const SignVector&) = default;
};

/// A line lies inside the zero set of a partition factor.
class LineInZeroSet : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// C(n + d, d) - 1: number of monomials of total degree 1..d in n variables.
std::size_t lifted_dimension(std::size_t n, std::size_t d);

/// Values of every monomial of total degree 1..d at x, in graded-lex order.
QVector monomial_lift(const QVector& x, std::size_t d);

/// Search budget for bisect_sets; 0 selects 10 * (total number of points).
struct BisectOptions {
    std::size_t iteration_budget = 0;
};

/// A nonzero polynomial of degree <= d that splits every set so that each
/// strict side {P > 0}, {P < 0} holds at most ceil(|set| (1 + tolerance) / 2)
/// of its points (points on P = 0 count toward neither side). Requires
/// 1 <= sets.size() <= lifted_dimension(n, d), tolerance in [0, 1/2) and at
/// least one point. Throws SearchExhausted when the budget runs out.
MultiPoly bisect_sets(std::span<const std::vector<QVector>> sets, std::size_t d, const Rational& tolerance,
                      std::uint64_t seed, const BisectOptions& options = {});

/// Same search with an explicit per-set cap on each strict side.
MultiPoly bisect_with_caps(std::span<const std::vector<QVector>> sets, std::span<const std::size_t> caps,
                           std::size_t d, std::uint64_t seed, const BisectOptions& options = {});

struct PartitionResult {
    std::size_t n = 0;
    std::size_t degree_budget = 0;
    Rational tolerance;
    std::vector<MultiPoly> factors;
    std::size_t product_degree = 0;
    /// Per input point: its class, or nullopt when some factor vanishes there.
    std::vector<std::optional<SignVector>> assignment;
    std::map<SignVector, std::size_t> class_counts;
    std::vector<std::size_t> zero_set_points;  ///< indices into the input
    std::size_t class_bound = 0;               ///< ceil(|S| (1 + tolerance)^j / 2^j)

    std::size_t j() const { return factors.size(); }
    std::size_t max_class_count() const;
    /// Product of the factors, expanded.
    MultiPoly product() const;
    /// Sign class of x, or nullopt when x lies on some factor's zero set.
    std::optional<SignVector> classify(const QVector& x) const;
};

/// ceil(total (1 + tolerance)^j / 2^j), exactly.
std::size_t partition_class_bound(std::size_t total, const Rational& tolerance, std::size_t j);

/// Iterated simultaneous bisection. Step i splits every current class with
/// a factor of the least degree whose lifted dimension is at least 2^(i-1);
/// stops before the factor degrees would sum past `degree`.
PartitionResult partition_points(std::span<const QVector> points, std::size_t n, std::size_t degree,
                                 const Rational& tolerance, std::uint64_t seed, const BisectOptions& options = {});

/// Number of open intervals the line is cut into by the product's zero set:
/// distinct real roots of the restricted product plus one. Throws
/// LineInZeroSet if the line lies inside some factor's zero set.
std::size_t line_cell_crossings(const PartitionResult& pr, const AffineFlat& line);

struct ZeroSetSplit {
    std::map<SignVector, std::vector<QVector>> buckets;
    std::vector<QVector> on_surface;
};

ZeroSetSplit split_joints_by_zero_set(const JointSet& joints, const PartitionResult& pr);

struct FamilyTally {
    std::size_t lines = 0;
    std::size_t lines_in_zero_set = 0;
    std::size_t incidences = 0;     ///< (line, on-surface joint) pairs over lines not in the zero set
    std::size_t max_per_line = 0;
    std::size_t bound = 0;          ///< (D + 1) * |family|
};

struct RecursionReport {
    std::size_t total = 0;
    std::map<SignVector, std::size_t> in_cells;
    std::size_t on_surface = 0;
    std::size_t max_class = 0;
    std::size_t j = 0;
    std::size_t product_degree = 0;
    std::size_t class_bound = 0;
    bool conserved = false;
    bool vanishing_check = false;
    std::vector<FamilyTally> tallies;
    std::vector<MultiPoly> factors;
};

/// One level of the partitioning argument on line families: finds the
/// joints, partitions them, buckets them by cell and surface, and checks the
/// vanishing-lemma incidence count for every line off the surface. Throws
/// InvariantViolation if conservation or the vanishing bound fails.
RecursionReport recursion_demo(std::span<const FlatFamily> families, std::size_t degree, const Rational& tolerance,
                               std::uint64_t seed, const BisectOptions& options = {});

}  // namespace jointlab
