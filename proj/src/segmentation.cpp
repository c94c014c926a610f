#include "bridgenav/segmentation.hpp"

#include "bridgenav/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <random>

namespace bridgenav {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Params {
    std::vector<double> weights;
    Points2 means;
    std::vector<Eigen::Matrix2d> covs;
};

Eigen::Matrix2d sample_covariance(std::span<const Point2> pts, const Point2& mean)
{
    Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
    for (const auto& p : pts) {
        const Point2 d = p - mean;
        s += d * d.transpose();
    }
    return s / static_cast<double>(pts.size());
}

Eigen::Matrix2d clamp_eigenvalues(const Eigen::Matrix2d& s, double floor)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(s);
    Eigen::Vector2d ev = es.eigenvalues().cwiseMax(floor);
    Eigen::Matrix2d out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    // exact symmetry
    out(0, 1) = out(1, 0) = 0.5 * (out(0, 1) + out(1, 0));
    return out;
}

double log_gauss(const Point2& x, const Point2& mu, const Eigen::Matrix2d& cov)
{
    const double a = cov(0, 0), b = cov(0, 1), d = cov(1, 1);
    const double det = a * d - b * b;
    if (!(det > 0.0))
        throw Error(Errc::SingularCovariance, "covariance lost positive definiteness");
    const double dx = x.x() - mu.x(), dy = x.y() - mu.y();
    const double maha = (d * dx * dx - 2.0 * b * dx * dy + a * dy * dy) / det;
    return -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * maha;
}

// Fills resp (n x k, row-major) and returns the total log-likelihood.
double e_step(std::span<const Point2> pts, const Params& p, std::vector<double>& resp)
{
    const std::size_t n = pts.size(), k = p.means.size();
    resp.assign(n * k, 0.0);
    std::vector<double> logw(k);
    for (std::size_t j = 0; j < k; ++j)
        logw[j] = p.weights[j] > 0.0 ? std::log(p.weights[j]) : kNegInf;
    long double total = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        double* row = &resp[i * k];
        double mx = kNegInf;
        for (std::size_t j = 0; j < k; ++j) {
            row[j] = logw[j] == kNegInf ? kNegInf : logw[j] + log_gauss(pts[i], p.means[j], p.covs[j]);
            mx = std::max(mx, row[j]);
        }
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            s += row[j] == kNegInf ? 0.0 : std::exp(row[j] - mx);
        const double lse = mx + std::log(s);
        for (std::size_t j = 0; j < k; ++j)
            row[j] = row[j] == kNegInf ? 0.0 : std::exp(row[j] - lse);
        total += lse;
    }
    return static_cast<double>(total);
}

void m_step(std::span<const Point2> pts, const std::vector<double>& resp, double floor, Params& p)
{
    const std::size_t n = pts.size(), k = p.means.size();
    for (std::size_t j = 0; j < k; ++j) {
        double nk = 0.0;
        Point2 mu = Point2::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            nk += resp[i * k + j];
            mu += resp[i * k + j] * pts[i];
        }
        p.weights[j] = nk / static_cast<double>(n);
        // An (almost) empty component keeps its shape; its share of the
        // expected log-likelihood is nil either way.
        if (nk < 1e-10 * static_cast<double>(n))
            continue;
        mu /= nk;
        Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 d = pts[i] - mu;
            s += resp[i * k + j] * (d * d.transpose());
        }
        p.means[j] = mu;
        p.covs[j] = clamp_eigenvalues(s / nk, floor);
    }
    double wsum = 0.0;
    for (double w : p.weights)
        wsum += w;
    for (double& w : p.weights)
        w /= wsum;
}

Points2 kmeanspp(std::span<const Point2> pts, std::size_t k, std::mt19937_64& rng)
{
    const std::size_t n = pts.size();
    Points2 centers;
    std::vector<bool> used(n, false);
    std::uniform_int_distribution<std::size_t> uni(0, n - 1);
    std::size_t first = uni(rng);
    centers.push_back(pts[first]);
    used[first] = true;
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i)
        d2[i] = (pts[i] - centers[0]).squaredNorm();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            total += used[i] ? 0.0 : d2[i];
        std::size_t pick = n;
        if (total > 0.0) {
            double target = unit(rng) * total;
            for (std::size_t i = 0; i < n; ++i) {
                if (used[i] || d2[i] == 0.0)
                    continue;
                pick = i;
                target -= d2[i];
                if (target < 0.0)
                    break;
            }
        }
        if (pick == n) {
            // every remaining point duplicates a chosen center
            for (std::size_t i = 0; i < n && pick == n; ++i)
                if (!used[i])
                    pick = i;
        }
        used[pick] = true;
        centers.push_back(pts[pick]);
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], (pts[i] - pts[pick]).squaredNorm());
    }
    return centers;
}

struct RunResult {
    Params params;
    double ll = kNegInf;
    std::vector<double> history;
    double max_drop = 0.0;
    int iterations = 0;
};

RunResult run_em(std::span<const Point2> pts, std::size_t k, std::mt19937_64& rng, double data_var,
                 double floor, const EmParams& ep)
{
    RunResult run;
    run.params.means = kmeanspp(pts, k, rng);
    run.params.weights.assign(k, 1.0 / static_cast<double>(k));
    const double iso = std::max(data_var, floor);
    run.params.covs.assign(k, iso * Eigen::Matrix2d::Identity());

    std::vector<double> resp;
    double ll = e_step(pts, run.params, resp);
    run.history.push_back(ll);
    for (int it = 0; it < ep.max_iter; ++it) {
        m_step(pts, resp, floor, run.params);
        const double next = e_step(pts, run.params, resp);
        run.history.push_back(next);
        run.max_drop = std::max(run.max_drop, ll - next);
        run.iterations = it + 1;
        const bool converged = next - ll < ep.rel_tol * std::abs(ll);
        ll = next;
        if (converged)
            break;
    }
    run.ll = ll;
    return run;
}

} // namespace

GmmModel em_gmm_fit(std::span<const Point2> points, std::size_t k, std::uint64_t seed, const EmParams& params)
{
    if (k < 1 || points.size() < k)
        throw Error(Errc::TooFewPoints, "need at least k >= 1 points");
    const Point2 mean = mean_of<2>(points);
    const Eigen::Matrix2d s0 = sample_covariance(points, mean);
    const double half_trace = 0.5 * s0.trace();
    double floor = 1e-6 * half_trace;
    if (!(floor > 0.0))
        floor = 1e-12;

    GmmModel best;
    double best_ll = kNegInf;
    double worst_drop = 0.0;
    const int restarts = std::max(1, params.restarts);
    for (int r = 0; r < restarts; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        RunResult run = run_em(points, k, rng, half_trace, floor, params);
        worst_drop = std::max(worst_drop, run.max_drop);
        if (run.ll > best_ll || r == 0) {
            best_ll = run.ll;
            best.k = k;
            best.weights = std::move(run.params.weights);
            best.means = std::move(run.params.means);
            best.covariances = std::move(run.params.covs);
            best.log_likelihood = run.ll;
            best.ll_history = std::move(run.history);
            best.iterations = run.iterations;
        }
    }
    best.covariance_floor = floor;
    best.max_ll_decrease = worst_drop;
    if (!std::isfinite(best.log_likelihood))
        throw Error(Errc::SingularCovariance, "log-likelihood is not finite");
    return best;
}

std::vector<int> assign_labels(const GmmModel& model, std::span<const Point2> points)
{
    std::vector<int> labels(points.size(), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = kNegInf;
        for (std::size_t j = 0; j < model.k; ++j) {
            if (!(model.weights[j] > 0.0))
                continue;
            const double v =
                std::log(model.weights[j]) + log_gauss(points[i], model.means[j], model.covariances[j]);
            if (v > best) {
                best = v;
                labels[i] = static_cast<int>(j);
            }
        }
    }
    return labels;
}

ClusterSet assign_clusters(const GmmModel& model, std::span<const Point2> points)
{
    const auto raw = assign_labels(model, points);
    std::vector<std::size_t> count(model.k, 0);
    for (int l : raw)
        ++count[static_cast<std::size_t>(l)];
    std::vector<int> remap(model.k, -1);
    ClusterSet cs;
    for (std::size_t j = 0; j < model.k; ++j) {
        if (count[j] == 0)
            continue;
        remap[j] = static_cast<int>(cs.clusters.size());
        Cluster c;
        c.id = remap[j];
        cs.clusters.push_back(std::move(c));
    }
    cs.labels.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int id = remap[static_cast<std::size_t>(raw[i])];
        cs.labels[i] = id;
        auto& c = cs.clusters[static_cast<std::size_t>(id)];
        c.points.push_back(points[i]);
        c.indices.push_back(i);
    }
    for (auto& c : cs.clusters)
        c.mean = mean_of<2>(c.points);
    cs.n_c = cs.clusters.size();
    cs.neighbors.assign(cs.n_c, std::vector<bool>(cs.n_c, false));
    return cs;
}

void compute_boundaries(ClusterSet& cs, double alpha_s)
{
    cs.boundaries.clear();
    for (const auto& c : cs.clusters)
        cs.boundaries.push_back(ncbe(c.points, alpha_s));
}

NeighborStats neighbor_stats(ClusterSet& cs, double l_b, double eps_border)
{
    const std::size_t n = cs.clusters.size();
    if (cs.boundaries.size() != n)
        throw Error(Errc::InvalidArgument, "boundaries must be computed before neighbour stats");

    struct Box {
        Point2 lo, hi;
    };
    std::vector<Box> boxes;
    for (const auto& b : cs.boundaries) {
        Box box{Point2::Constant(std::numeric_limits<double>::infinity()),
                Point2::Constant(-std::numeric_limits<double>::infinity())};
        for (const auto& p : b.points) {
            box.lo = box.lo.cwiseMin(p);
            box.hi = box.hi.cwiseMax(p);
        }
        boxes.push_back(box);
    }

    NeighborStats st;
    st.counts.assign(n, 0);
    cs.neighbors.assign(n, std::vector<bool>(n, false));
    cs.borders.clear();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const bool apart = (boxes[a].lo.array() > boxes[b].hi.array() + eps_border).any() ||
                               (boxes[b].lo.array() > boxes[a].hi.array() + eps_border).any();
            if (apart)
                continue;
            Border border = cluster_border(cs.boundaries[a], cs.boundaries[b], eps_border);
            if (!are_neighbors(border, l_b))
                continue;
            border.cluster_a = static_cast<int>(a);
            border.cluster_b = static_cast<int>(b);
            cs.neighbors[a][b] = cs.neighbors[b][a] = true;
            ++st.counts[a];
            ++st.counts[b];
            cs.borders.push_back(std::move(border));
        }
    }
    auto sorted = st.counts;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    st.n_m = sorted.empty() ? 0 : sorted[0];
    st.n_s = sorted.size() < 2 ? 0 : sorted[1];
    return st;
}

double cluster_ratio(std::size_t n_m, std::size_t n_s, std::size_t n_c)
{
    if (n_c < 1 || n_s > n_m)
        throw Error(Errc::InvalidArgument, "ratio needs n_c >= 1 and n_m >= n_s");
    if (n_m == 0)
        return 0.0;
    const double m = static_cast<double>(n_m);
    return m / (m + static_cast<double>(n_s)) + m / static_cast<double>(n_c);
}

namespace {

struct Candidate {
    ClusterSet cs;
    RatioRecord record;
};

Candidate evaluate(std::span<const Point2> points, std::size_t n_c, const SegmentationParams& p)
{
    Candidate cand;
    const GmmModel model = em_gmm_fit(points, n_c, p.seed, p.em);
    cand.cs = assign_clusters(model, points);
    compute_boundaries(cand.cs, p.alpha_s);
    const NeighborStats st = neighbor_stats(cand.cs, p.l_b, p.eps_border);
    cand.record.n_c = n_c;
    cand.record.n_m = st.n_m;
    cand.record.n_s = st.n_s;
    cand.record.r = cluster_ratio(st.n_m, st.n_s, n_c);
    cand.record.log_likelihood = model.log_likelihood;
    const double n_params = 6.0 * static_cast<double>(n_c) - 1.0;
    cand.record.bic = -2.0 * model.log_likelihood + n_params * std::log(static_cast<double>(points.size()));
    cand.record.max_ll_decrease = model.max_ll_decrease;
    return cand;
}

} // namespace

ClusterSet segment_structure(std::span<const Point2> points, const SegmentationParams& params)
{
    if (params.n_cmin < 2 || params.n_cmax < params.n_cmin)
        throw Error(Errc::InvalidArgument, "cluster range must satisfy 2 <= n_cmin <= n_cmax");
    if (points.size() < params.n_cmax)
        throw Error(Errc::TooFewPoints, "fewer points than the largest cluster count");

    std::vector<Candidate> cands;
    if (params.parallel) {
        std::vector<std::future<Candidate>> jobs;
        for (std::size_t n_c = params.n_cmin; n_c <= params.n_cmax; ++n_c)
            jobs.push_back(std::async(std::launch::async, evaluate, points, n_c, std::cref(params)));
        for (auto& j : jobs)
            cands.push_back(j.get());
    } else {
        for (std::size_t n_c = params.n_cmin; n_c <= params.n_cmax; ++n_c)
            cands.push_back(evaluate(points, n_c, params));
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < cands.size(); ++i)
        if (cands[i].record.r > cands[best].record.r)
            best = i;

    // The fit at the selected count is seeded identically, so the sweep's
    // candidate is exactly the refit.
    ClusterSet out = std::move(cands[best].cs);
    for (const auto& c : cands)
        out.ratio_table.push_back(c.record);
    return out;
}

} // namespace bridgenav
