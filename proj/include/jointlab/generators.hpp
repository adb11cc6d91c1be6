#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jointlab/flats.hpp"

namespace jointlab {

/// Axis-parallel lines through the integer grid {0..S-1}^n: family i holds
/// the S^(n-1) lines parallel to e_i. Joints are exactly the S^n grid points.
std::vector<FlatFamily> grid_lines(std::size_t n, std::size_t side);

/// The grid construction for k families of lines in R^k, with family i's
/// lines thickened into alpha_i-flats. Coordinates are the base block R^k
/// followed by one auxiliary block of dimension alpha_i - 1 per family; a
/// member spans e_i plus its family's auxiliary axes, with base point the
/// grid point padded by zeros. Ambient dimension is sum(alpha_i); joints
/// are exactly the S^k base-grid points.
std::vector<FlatFamily> grid_flats(std::size_t k, std::span<const std::size_t> alphas, std::size_t side);

/// `count` distinct alpha-flats in R^n with integer base and direction
/// coordinates in [-coord_bound, coord_bound], determined by `seed`.
FlatFamily random_flats(std::size_t n, std::size_t alpha, std::size_t count, std::int64_t coord_bound,
                        std::uint64_t seed);

/// n families of lines through the origin, family i holding multiplicities[i]
/// lines; member 0 of family i is the e_i axis. Every cross-family n-tuple
/// is verified to span, so the origin is the single joint with N = m.
std::vector<FlatFamily> bush_config(std::size_t n, std::span<const std::size_t> multiplicities, std::uint64_t seed);

}  // namespace jointlab
