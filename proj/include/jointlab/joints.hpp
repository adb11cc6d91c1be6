#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "jointlab/flats.hpp"

namespace jointlab {

/// How N_i(x) is counted at a joint x.
enum class MultiplicityConvention {
    spanning_witness,  ///< family-i members through x that occur in some spanning tuple at x
    all_members,       ///< every family-i member through x
};

enum class JointStrategy {
    naive,        ///< scan the full product of the families
    accelerated,  ///< candidates from pairwise intersections of the two smallest families
};

struct JointOptions {
    MultiplicityConvention multiplicity = MultiplicityConvention::spanning_witness;
    JointStrategy strategy = JointStrategy::accelerated;
};

struct JointRecord {
    QVector location;
    std::vector<std::size_t> multiplicities;  ///< N_i(x), one per family
    std::vector<std::size_t> witness;         ///< member index per family; lexicographically first spanning tuple
    friend bool operator==(const JointRecord&, const JointRecord&) = default;
};

/// Joints keyed by exact location, iterated in lexicographic location order.
struct JointSet {
    std::map<QVector, JointRecord> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    auto begin() const { return records.begin(); }
    auto end() const { return records.end(); }
    friend bool operator==(const JointSet&, const JointSet&) = default;
};

/// All joints formed by one flat from each family: points where the chosen
/// flats meet and their direction spaces span Q^n. Requires at least two
/// non-empty families in a common Q^n with dimensions in [1, n) summing to n.
JointSet find_joints(std::span<const FlatFamily> families, const JointOptions& options = {});

/// Joints of a single set of lines in Q^n: find_joints on n copies of it.
JointSet find_joints_same_set(const FlatFamily& lines, std::size_t n, const JointOptions& options = {});

struct CarberySum {
    double value = 0.0;
    double error_bound = 0.0;  ///< absolute; records * 2^-45 relative to value
};

/// Sum over joints of (prod_i N_i(x))^(1/(n-1)). The products are exact
/// integers; only the root and the summation are floating point.
CarberySum carbery_sum(const JointSet& joints, std::size_t n);

struct TransversalityReport {
    bool transversal = true;
    std::optional<std::vector<std::size_t>> counterexample;  ///< member index per family
    std::optional<QVector> meeting_point;                    ///< a common point of the counterexample
};

/// Whether every tuple of lines (one per family) that shares a point has
/// spanning directions. Requires n families of lines in Q^n. On failure the
/// lexicographically first violating tuple is reported.
TransversalityReport is_transversal(std::span<const FlatFamily> families);

}  // namespace jointlab
