#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wearnet {

struct KMeansOptions {
  std::size_t k = 7;
  std::uint64_t seed = 0;
  std::size_t max_iter = 300;
  double tol = 1e-9;        // stop once no centroid moves farther than this
  std::size_t restarts = 10;
};

struct KMeansResult {
  std::size_t dim = 1;
  std::vector<double> centroids;       // k * dim, row-major
  std::vector<std::size_t> assignment; // point -> cluster
  double wcss = 0.0;                   // within-cluster sum of squares
  std::size_t iterations = 0;
  std::vector<double> wcss_trace;      // WCSS after each assignment step of the kept restart
};

/// Lloyd's algorithm from k-means++ seeds, best of `restarts` by WCSS (ties to
/// the lowest restart index). `points` is row-major n x dim.
///
/// Points go to the nearest centroid, ties to the lower index. A cluster left
/// empty after assignment is reseeded at the point farthest from its centroid.
/// Throws kCapacity when there are fewer points than clusters.
KMeansResult kmeans(std::span<const double> points, std::size_t dim, const KMeansOptions& options);

inline KMeansResult kmeans_1d(std::span<const double> points, const KMeansOptions& options) {
  return kmeans(points, 1, options);
}

/// Level names: the seven wear bands for k = 7, "level-<i>" otherwise.
std::vector<std::string> level_names(std::size_t k);

struct WearLabeling {
  std::size_t k = 0;
  std::vector<double> centroids;        // ascending, one per level (entropy coordinate)
  std::vector<std::size_t> assignment;  // snapshot -> level, level 0 = lowest entropy
  std::vector<std::string> level_names;
};

/// Clusters the entropy series and maps clusters to ordinal wear levels by
/// ascending centroid. entropy[j] labels snapshot j + window_len - 1; the first
/// window_len - 1 snapshots inherit the level of snapshot window_len - 1.
WearLabeling label_run(std::span<const double> entropy, std::size_t window_len,
                       const KMeansOptions& options);

/// Two-dimensional variant clustering (entropy[j], tsf[j + window_len - 1])
/// pairs; levels are ordered by the entropy coordinate of each centroid.
WearLabeling label_run_2d(std::span<const double> entropy, std::span<const double> tsf_values,
                          std::size_t window_len, const KMeansOptions& options);

}  // namespace wearnet
