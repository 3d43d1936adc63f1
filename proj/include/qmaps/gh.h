#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmaps/metric.h"

namespace qmaps {

/// Relation between the points of two finite spaces of sizes a_size, b_size.
struct Correspondence {
    std::size_t a_size = 0;
    std::size_t b_size = 0;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    /// Every point of A and every point of B appears in some pair.
    bool covers() const;

    static Correspondence identity(std::size_t n);
    static Correspondence full(std::size_t a_size, std::size_t b_size);
};

/// sup over related pairs (a, b), (a', b') of |d_A(a, a') - d_B(b, b')|.
/// Throws Error{NotCovering} if R does not cover both spaces (or its sizes do
/// not match them).
double distortion(const Correspondence& r, const FiniteMetricSpace& a, const FiniteMetricSpace& b);

inline constexpr std::size_t kMaxExactGhPoints = 7;

struct GhResult {
    double value = 0;
    /// A correspondence of distortion 2 * value.
    Correspondence witness;
};

/// Exact Gromov-Hausdorff distance, half the least distortion of a
/// correspondence, by branch and bound. Throws Error{SizeTooLarge} when a
/// space has more than kMaxExactGhPoints points.
GhResult gh_exact_small(const FiniteMetricSpace& a, const FiniteMetricSpace& b, unsigned threads = 1);

/// Lower bound on the Gromov-Hausdorff distance, the largest of
///  - half the difference of diameters,
///  - half the Hausdorff distance between the sets of distance values,
///  - half the largest, over points x of either space, of the least Hausdorff
///    distance between the distance row of x and a distance row of the
///    other space.
double gh_lower_bounds(const FiniteMetricSpace& a, const FiniteMetricSpace& b);

/// Text format: point count, then rows 1..n-1 holding d(i, 0) .. d(i, i-1).
/// Throws Error{MalformedInput}.
FiniteMetricSpace parse_distance_matrix(std::string_view text);
std::string to_distance_matrix_text(const FiniteMetricSpace& space);

}  // namespace qmaps
