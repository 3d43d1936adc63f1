#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmaps/trees.h"

namespace qmaps {

/// Seed of sample `index` at size n, derived from the master seed by
/// splitmix64 mixing. Independent of thread count and job order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t index);

struct EnsembleSpec {
    std::vector<std::size_t> sizes;
    std::size_t samples_per_size = 1;
    std::uint64_t seed = 0;
    SamplingMode mode = SamplingMode::FreeShift;
    /// Double-sweep diameter lower bound (two extra BFS per sample).
    bool diameter = true;
    unsigned threads = 0;

    /// Throws Error{MalformedInput} unless sizes are non-empty, positive and
    /// strictly increasing and samples_per_size >= 1.
    void validate() const;
};

struct StatRecord {
    std::size_t n = 0;
    std::size_t sample = 0;
    std::uint64_t seed = 0;
    int radius = 0;          // max distance from the pointed vertex (BFS)
    int diameter_lower = 0;  // double sweep, 0 when disabled
    int max_label = 0;       // max tree label
    int max_height = 0;      // max contour height
    double rescaled_radius = 0;    // (9/(8n))^{1/4} radius
    double rescaled_diameter = 0;  // n^{-1/4} diameter_lower
    double rescaled_height = 0;    // (2n)^{-1/2} max_height
};

/// One record per (n, sample), sorted by (n, sample).
std::vector<StatRecord> run_ensemble(const EnsembleSpec& spec);
std::string ensemble_csv(std::span<const StatRecord> records);

enum class Statistic { Radius, DiameterLower, MaxLabel, MaxHeight };
std::string_view to_string(Statistic s);
Statistic parse_statistic(std::string_view text);

struct FitResult {
    double slope = 0;
    double intercept = 0;
    /// Standard error of the slope (0 when the fit is exact or has 2 points).
    double stderr_slope = 0;
    std::size_t points = 0;
};

/// Least squares of log y against log x. Throws Error{DegenerateFit} with
/// fewer than 3 distinct x values or any non-positive value.
FitResult fit_power_law(std::span<const std::pair<double, double>> points);
/// Fit of log(mean statistic) against log n over the sizes in `records`.
FitResult fit_exponent(std::span<const StatRecord> records, Statistic statistic);

struct AncestorRecord {
    std::size_t n = 0;
    std::size_t sample = 0;
    std::uint64_t seed = 0;
    std::size_t i = 0, j = 0;
    int label_gap = 0;
    int distance = 0;
    double rescaled_distance = 0;  // n^{-1/4} distance
};

/// Graph distance between the vertices visited at contour times i and j of
/// the tree's Schaeffer image, after checking that x(i) is a strict ancestor
/// of x(j) (C_i = min C over [i, j] and C_i < C_j). Throws Error{NoValidPair}.
int ancestor_pair_distance(const WellLabeledTree& t, std::size_t i, std::size_t j);

/// Per sample, a random pair of contour times i < j with j - i >= n/4 and
/// x(i) a strict ancestor of x(j), preferring label gaps of at least
/// (8n/9)^{1/4}. Samples without such a pair are redrawn from the next
/// derived seed. Throws Error{MalformedInput} for n < 64.
std::vector<AncestorRecord> ancestor_geodesic_stat(std::size_t n, std::size_t samples, std::uint64_t seed,
                                                   SamplingMode mode = SamplingMode::ExactRejection,
                                                   unsigned threads = 0);
std::string ancestor_csv(std::span<const AncestorRecord> records);

/// Linear-interpolation percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

enum class PlotKind { LogLog, Profile };

/// Standalone SVG. LogLog reads an ensemble-style CSV with an `n` column and
/// plots the mean of `column` per n on log axes with the fitted line and its
/// slope; Profile reads "distance,count" rows and reports the total mass.
/// Throws Error{MalformedCSV}.
std::string emit_svg(std::string_view csv, PlotKind kind, std::string_view column = "radius");

}  // namespace qmaps
