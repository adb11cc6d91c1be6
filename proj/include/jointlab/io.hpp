#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"

#include "jointlab/flats.hpp"
#include "jointlab/joints.hpp"
#include "jointlab/partition.hpp"
#include "jointlab/poly.hpp"
#include "jointlab/rational.hpp"

// JSON encodings. Rationals are "p/q" strings ("p" when q == 1); every
// writer emits canonical forms, so write(read(write(x))) is byte-identical.
namespace jointlab {

using json = nlohmann::json;

void to_json(json& j, const Rational& r);
void from_json(const json& j, Rational& r);

/// Points: ["p/q", ...]
json vector_to_json(const QVector& v);
QVector vector_from_json(const json& j);

/// [{"exponents": [e_1..e_n], "coeff": "p/q"}, ...] in graded-lex order.
void to_json(json& j, const MultiPoly& p);
/// The zero polynomial decodes with zero variables; use multipoly_from_json when n matters.
void from_json(const json& j, MultiPoly& p);
MultiPoly multipoly_from_json(const json& j, std::size_t n_vars);

/// {"ambient_dim": n, "base": [..], "directions": [[..], ..]}, one inner
/// list per direction vector of the canonical basis.
void to_json(json& j, const AffineFlat& f);
void from_json(const json& j, AffineFlat& f);

/// {"ambient_dim": n, "flat_dim": a, "members": [flat, ..]}
void to_json(json& j, const FlatFamily& f);
void from_json(const json& j, FlatFamily& f);

/// [{"location": [..], "multiplicities": [..], "witness": [[family, member], ..]}, ..]
/// sorted by location.
void to_json(json& j, const JointSet& js);
void from_json(const json& j, JointSet& js);

/// {"n", "degree_budget", "tolerance", "j", "product_degree", "class_bound",
///  "factors": [MultiPoly..], "class_counts": {"+-": c}, "zero_set_indices": [..],
///  "assignment": ["+-" | null, ..]}
void to_json(json& j, const PartitionResult& pr);
void from_json(const json& j, PartitionResult& pr);

json points_to_json(const std::vector<QVector>& points);
std::vector<QVector> points_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace jointlab
