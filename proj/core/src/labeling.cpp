#include "wearnet/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wearnet/error.hpp"
#include "wearnet/rng.hpp"

namespace wearnet {
namespace {

double sq_dist(const double* a, const double* b, std::size_t dim) {
  double d = 0.0;
  for (std::size_t i = 0; i < dim; ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

struct Lloyd {
  std::span<const double> points;
  std::size_t n;
  std::size_t dim;
  std::size_t k;

  const double* point(std::size_t i) const { return points.data() + i * dim; }

  std::vector<double> seed_plus_plus(Rng& rng) const {
    std::vector<double> c(k * dim);
    const std::size_t first = static_cast<std::size_t>(rng.below(n));
    std::copy_n(point(first), dim, c.begin());
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(point(i), c.data(), dim);
    for (std::size_t j = 1; j < k; ++j) {
      const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
      std::size_t pick = 0;
      if (total > 0.0) {
        const double target = rng.uniform() * total;
        double run = 0.0;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          run += d2[i];
          if (run > target && d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = static_cast<std::size_t>(rng.below(n));
      }
      std::copy_n(point(pick), dim, c.begin() + static_cast<std::ptrdiff_t>(j * dim));
      for (std::size_t i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], sq_dist(point(i), c.data() + j * dim, dim));
      }
    }
    return c;
  }

  double assign(const std::vector<double>& c, std::vector<std::size_t>& assignment) const {
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = sq_dist(point(i), c.data(), dim);
      for (std::size_t j = 1; j < k; ++j) {
        const double d = sq_dist(point(i), c.data() + j * dim, dim);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      assignment[i] = best;
      wcss += best_d;
    }
    return wcss;
  }

  KMeansResult run(std::vector<double> c, const KMeansOptions& opt) const {
    KMeansResult r;
    r.dim = dim;
    r.assignment.assign(n, 0);
    std::vector<double> next(k * dim);
    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < std::max<std::size_t>(opt.max_iter, 1); ++iter) {
      r.wcss_trace.push_back(assign(c, r.assignment));
      r.iterations = iter + 1;

      // Running means stay exact on clusters of identical points.
      std::fill(next.begin(), next.end(), 0.0);
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = r.assignment[i];
        const double inv = 1.0 / static_cast<double>(++counts[j]);
        for (std::size_t d = 0; d < dim; ++d) next[j * dim + d] += (point(i)[d] - next[j * dim + d]) * inv;
      }
      for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] > 0) continue;
        // Reseed at the point farthest from the centroid it is assigned to.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = sq_dist(point(i), next.data() + r.assignment[i] * dim, dim);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        std::copy_n(point(far), dim, next.begin() + static_cast<std::ptrdiff_t>(j * dim));
      }

      double moved = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        moved = std::max(moved, std::sqrt(sq_dist(c.data() + j * dim, next.data() + j * dim, dim)));
      }
      c.swap(next);
      if (moved <= opt.tol) break;
    }
    r.wcss = assign(c, r.assignment);
    r.centroids = std::move(c);
    return r;
  }
};

WearLabeling finish_labeling(const KMeansResult& km, std::size_t order_dim, std::size_t n_entropy,
                             std::size_t window_len, std::size_t k) {
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return km.centroids[a * km.dim + order_dim] < km.centroids[b * km.dim + order_dim];
  });
  std::vector<std::size_t> rank(k);
  for (std::size_t lvl = 0; lvl < k; ++lvl) rank[order[lvl]] = lvl;

  WearLabeling wl;
  wl.k = k;
  wl.level_names = level_names(k);
  for (std::size_t lvl = 0; lvl < k; ++lvl) {
    wl.centroids.push_back(km.centroids[order[lvl] * km.dim + order_dim]);
  }
  const std::size_t lead = window_len - 1;
  wl.assignment.resize(n_entropy + lead);
  for (std::size_t j = 0; j < n_entropy; ++j) wl.assignment[j + lead] = rank[km.assignment[j]];
  for (std::size_t j = 0; j < lead; ++j) wl.assignment[j] = wl.assignment[lead];
  return wl;
}

}  // namespace

KMeansResult kmeans(std::span<const double> points, std::size_t dim, const KMeansOptions& options) {
  if (dim == 0 || points.size() % dim != 0) raise(ErrorKind::kShape, "points not n x dim");
  if (options.k == 0) raise(ErrorKind::kCapacity, "k must be >= 1");
  const std::size_t n = points.size() / dim;
  if (n < options.k) {
    raise(ErrorKind::kCapacity, std::to_string(n) + " points cannot form " +
                                    std::to_string(options.k) + " clusters");
  }
  const Lloyd lloyd{points, n, dim, options.k};
  KMeansResult best;
  bool have = false;
  for (std::size_t r = 0; r < std::max<std::size_t>(options.restarts, 1); ++r) {
    Rng rng(mix_seed(options.seed, r));
    KMeansResult res = lloyd.run(lloyd.seed_plus_plus(rng), options);
    if (!have || res.wcss < best.wcss) {
      best = std::move(res);
      have = true;
    }
  }
  return best;
}

std::vector<std::string> level_names(std::size_t k) {
  if (k == 7) {
    return {"0%-9%", "10%-24%", "25%-39%", "40%-54%", "55%-69%", "70%-84%", "85%-100%"};
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < k; ++i) names.push_back("level-" + std::to_string(i));
  return names;
}

WearLabeling label_run(std::span<const double> entropy, std::size_t window_len,
                       const KMeansOptions& options) {
  if (window_len == 0) raise(ErrorKind::kRange, "window length must be >= 1");
  const KMeansResult km = kmeans_1d(entropy, options);
  return finish_labeling(km, 0, entropy.size(), window_len, options.k);
}

WearLabeling label_run_2d(std::span<const double> entropy, std::span<const double> tsf_values,
                          std::size_t window_len, const KMeansOptions& options) {
  if (window_len == 0) raise(ErrorKind::kRange, "window length must be >= 1");
  if (tsf_values.size() != entropy.size() + window_len - 1) {
    raise(ErrorKind::kShape, "TSF series length does not match entropy series");
  }
  std::vector<double> pts;
  pts.reserve(entropy.size() * 2);
  for (std::size_t j = 0; j < entropy.size(); ++j) {
    pts.push_back(entropy[j]);
    pts.push_back(tsf_values[j + window_len - 1]);
  }
  const KMeansResult km = kmeans(pts, 2, options);
  return finish_labeling(km, 0, entropy.size(), window_len, options.k);
}

}  // namespace wearnet
