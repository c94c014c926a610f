#pragma once

#include "bridgenav/boundary.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace bridgenav {

struct GmmModel {
    std::size_t k = 0;
    std::vector<double> weights;
    Points2 means;
    std::vector<Eigen::Matrix2d> covariances;
    double log_likelihood = 0.0;
    /// Smallest eigenvalue any covariance is allowed to reach.
    double covariance_floor = 0.0;
    /// Log-likelihood after every EM iteration of the kept restart.
    std::vector<double> ll_history;
    /// Largest drop between consecutive entries over every restart (0 if none).
    double max_ll_decrease = 0.0;
    int iterations = 0;
};

struct EmParams {
    int max_iter = 200;
    double rel_tol = 1e-7;
    int restarts = 3;
};

/// Full-covariance EM with k-means++ seeding. Covariance eigenvalues are
/// clamped to 1e-6 * trace(sample covariance) / 2.
GmmModel em_gmm_fit(std::span<const Point2> points, std::size_t k, std::uint64_t seed,
                    const EmParams& params = {});

/// Maximum-posterior component per point; ties go to the lowest index.
std::vector<int> assign_labels(const GmmModel& model, std::span<const Point2> points);

struct Cluster {
    int id = 0;
    Points2 points;
    std::vector<std::size_t> indices;
    Point2 mean = Point2::Zero();
};

struct RatioRecord {
    std::size_t n_c = 0;
    std::size_t n_m = 0;
    std::size_t n_s = 0;
    double r = 0.0;
    double log_likelihood = 0.0;
    double bic = 0.0;
    double max_ll_decrease = 0.0;
};

struct ClusterSet {
    std::vector<Cluster> clusters;
    /// Cluster id per input point.
    std::vector<int> labels;
    std::vector<Boundary> boundaries;
    /// Symmetric, false diagonal.
    std::vector<std::vector<bool>> neighbors;
    /// Borders of every neighbouring pair (a < b).
    std::vector<Border> borders;
    std::size_t n_c = 0;
    std::vector<RatioRecord> ratio_table;

    std::size_t size() const { return clusters.size(); }
};

/// Groups points by GMM label. Components that receive no points are dropped
/// and the remaining ids are compacted in component order.
ClusterSet assign_clusters(const GmmModel& model, std::span<const Point2> points);

/// Fills boundaries with NCBE at the given slicing width.
void compute_boundaries(ClusterSet& cs, double alpha_s);

struct NeighborStats {
    std::size_t n_m = 0;
    std::size_t n_s = 0;
    std::vector<std::size_t> counts;
};

/// Pairwise borders and neighbour counts. Also stores the neighbour matrix
/// and neighbouring borders back into cs.
NeighborStats neighbor_stats(ClusterSet& cs, double l_b, double eps_border);

double cluster_ratio(std::size_t n_m, std::size_t n_s, std::size_t n_c);

struct SegmentationParams {
    std::size_t n_cmin = 2;
    std::size_t n_cmax = 6;
    double l_b = 0.05;
    double eps_border = 0.03;
    double alpha_s = 0.015;
    std::uint64_t seed = 0;
    EmParams em;
    bool parallel = true;
};

/// Sweeps the cluster count, scores each with the neighbour ratio and
/// returns the best-scoring segmentation (smallest count on ties).
ClusterSet segment_structure(std::span<const Point2> points, const SegmentationParams& params);

} // namespace bridgenav
