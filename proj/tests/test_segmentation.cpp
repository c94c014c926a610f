#include "bridgenav/error.hpp"
#include "bridgenav/segmentation.hpp"
#include "bridgenav/synth.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <random>

using namespace bridgenav;

namespace {

Points2 blobs(std::uint64_t seed, std::vector<int>* truth = nullptr)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.1);
    Points2 pts;
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < 500; ++i) {
            pts.emplace_back(5.0 * b + n(rng), n(rng));
            if (truth)
                truth->push_back(b);
        }
    return pts;
}

SegmentationParams params_for(const Points2& pts, std::uint64_t seed, std::size_t lo, std::size_t hi)
{
    SegmentationParams sp;
    sp.alpha_s = default_alpha(pts);
    sp.eps_border = 2.0 * sp.alpha_s;
    sp.l_b = std::max(0.03, 2.0 * sp.eps_border);
    sp.n_cmin = lo;
    sp.n_cmax = hi;
    sp.seed = seed;
    return sp;
}

} // namespace

TEST_SUITE("segmentation")
{
    TEST_CASE("one component reproduces the sample moments")
    {
        const Points2 pts = blobs(1);
        const GmmModel m = em_gmm_fit(pts, 1, 3);
        Point2 mean = Point2::Zero();
        for (const auto& p : pts)
            mean += p;
        mean /= static_cast<double>(pts.size());
        Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
        for (const auto& p : pts)
            cov += (p - mean) * (p - mean).transpose();
        cov /= static_cast<double>(pts.size());
        CHECK((m.means[0] - mean).norm() < 1e-9);
        CHECK((m.covariances[0] - cov).norm() < 1e-9);
        CHECK(m.weights[0] == doctest::Approx(1.0));
        CHECK(m.max_ll_decrease <= 1e-9);
    }

    TEST_CASE("two separated blobs are recovered")
    {
        std::vector<int> truth;
        const Points2 pts = blobs(2, &truth);
        const GmmModel m = em_gmm_fit(pts, 2, 5);
        std::vector<Point2> means = m.means;
        std::sort(means.begin(), means.end(), [](const Point2& a, const Point2& b) { return a.x() < b.x(); });
        CHECK((means[0] - Point2(0, 0)).norm() < 0.05);
        CHECK((means[1] - Point2(5, 0)).norm() < 0.05);
        CHECK(m.max_ll_decrease <= 1e-9);

        const std::vector<int> labels = assign_labels(m, pts);
        std::map<std::pair<int, int>, int> joint;
        for (std::size_t i = 0; i < pts.size(); ++i)
            ++joint[{labels[i], truth[i]}];
        const int straight = joint[{0, 0}] + joint[{1, 1}], crossed = joint[{0, 1}] + joint[{1, 0}];
        CHECK(std::max(straight, crossed) >= static_cast<int>(0.99 * pts.size()));
    }

    TEST_CASE("as many components as points clamps to the floor")
    {
        const Points2 pts = {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 2}};
        const GmmModel m = em_gmm_fit(pts, pts.size(), 1);
        for (const auto& mu : m.means) {
            double best = 1e9;
            for (const auto& p : pts)
                best = std::min(best, (mu - p).norm());
            CHECK(best < 1e-6);
        }
        for (const auto& c : m.covariances) {
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c);
            CHECK(es.eigenvalues().minCoeff() >= m.covariance_floor * (1.0 - 1e-9));
            CHECK(es.eigenvalues().minCoeff() <= m.covariance_floor * 10.0);
        }
        CHECK_THROWS_AS(em_gmm_fit(pts, pts.size() + 1, 1), Error);
    }

    TEST_CASE("log-likelihood never decreases over iterations")
    {
        std::mt19937_64 rng(9);
        for (int trial = 0; trial < 10; ++trial) {
            StructureSpec s;
            s.shape = static_cast<Shape>(trial % 5);
            s.density = 3000;
            s.seed = static_cast<std::uint64_t>(trial);
            const Points2 pts = xy_points(generate(s).first);
            const GmmModel m = em_gmm_fit(pts, 2 + trial % 5, rng());
            CHECK(m.max_ll_decrease <= 1e-9);
            for (std::size_t i = 1; i < m.ll_history.size(); ++i)
                CHECK(m.ll_history[i] - m.ll_history[i - 1] >= -1e-9);
        }
    }

    TEST_CASE("assignment at a mean and on a tie")
    {
        GmmModel m;
        m.k = 2;
        m.weights = {0.5, 0.5};
        m.means = {{0, 0}, {10, 0}};
        m.covariances = {Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()};
        const Points2 q = {{10, 0}, {0, 0}, {5, 0}};
        const std::vector<int> labels = assign_labels(m, q);
        CHECK(labels[0] == 1);
        CHECK(labels[1] == 0);
        CHECK(labels[2] == 0);
    }

    TEST_CASE("ratio values")
    {
        CHECK(cluster_ratio(4, 1, 5) == doctest::Approx(1.6));
        CHECK(cluster_ratio(2, 2, 4) == doctest::Approx(1.0));
        CHECK(cluster_ratio(0, 0, 3) == 0.0);
    }

    TEST_CASE("far apart clusters have no neighbours")
    {
        const Points2 pts = blobs(3);
        std::vector<int> labels;
        for (const auto& p : pts)
            labels.push_back(p.x() > 2.5 ? 1 : 0);
        ClusterSet cs = testutil::from_labels(pts, labels, 0.05);
        const NeighborStats st = neighbor_stats(cs, 0.05, 0.02);
        CHECK(st.n_m == 0);
        CHECK(st.n_s == 0);
        CHECK_FALSE(cs.neighbors[0][1]);
    }

    TEST_CASE("cross pieces make the center the only hub")
    {
        StructureSpec s;
        s.shape = Shape::Cross;
        s.bar_width = 0.1;
        s.noise_sigma = 0.0;
        s.seed = 4;
        auto [cloud, gt] = generate(s);
        const Points2 pts = xy_points(cloud);
        const double alpha = default_alpha(pts);
        ClusterSet cs = testutil::from_labels(pts, gt.labels, alpha);
        const NeighborStats st = neighbor_stats(cs, 4.0 * alpha, 2.0 * alpha);
        CHECK(st.counts[0] == 4);
        CHECK(st.n_m == 4);
        CHECK(st.n_s <= 2);
    }

    TEST_CASE("three clusters in a row count 1, 2, 1")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Points2 pts;
        std::vector<int> labels;
        for (int i = 0; i < 9000; ++i) {
            const Point2 p(3.0 * u(rng), 0.1 * u(rng));
            pts.push_back(p);
            labels.push_back(std::min(2, static_cast<int>(p.x())));
        }
        ClusterSet cs = testutil::from_labels(pts, labels, 0.02);
        const NeighborStats st = neighbor_stats(cs, 0.05, 0.04);
        CHECK(st.counts == std::vector<std::size_t>{1, 2, 1});
        CHECK(st.n_m == 2);
        CHECK(st.n_s == 1);
    }

    TEST_CASE("L shape selects three clusters in most seeds")
    {
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            StructureSpec s;
            s.shape = Shape::L;
            s.seed = seed;
            const Points2 pts = xy_points(generate(s).first);
            const ClusterSet cs = segment_structure(pts, params_for(pts, seed, 2, 6));
            hits += cs.size() == 3;
            CHECK(cs.size() >= 2);
            CHECK(cs.size() <= 6);
        }
        CHECK(hits >= 8);
    }

    TEST_CASE("ties in the ratio go to the smallest count")
    {
        std::mt19937_64 rng(6);
        std::normal_distribution<double> n(0.0, 0.1);
        Points2 pts;
        for (int i = 0; i < 2000; ++i)
            pts.emplace_back(n(rng), n(rng));
        const ClusterSet cs = segment_structure(pts, params_for(pts, 3, 2, 4));
        double best = -1.0;
        for (const auto& r : cs.ratio_table)
            best = std::max(best, r.r);
        std::size_t expected = 0;
        for (const auto& r : cs.ratio_table)
            if (r.r == best) {
                expected = r.n_c;
                break;
            }
        CHECK(cs.n_c == expected);
        for (const auto& r : cs.ratio_table)
            CHECK(r.max_ll_decrease <= 1e-9);
    }

    TEST_CASE("segmentation is deterministic and reproducible from its seed")
    {
        StructureSpec s;
        s.shape = Shape::T;
        s.density = 8000;
        s.seed = 2;
        const Points2 pts = xy_points(generate(s).first);
        SegmentationParams sp = params_for(pts, 11, 2, 5);
        const ClusterSet a = segment_structure(pts, sp);
        sp.parallel = false;
        const ClusterSet b = segment_structure(pts, sp);
        CHECK(a.labels == b.labels);
        CHECK(a.n_c == b.n_c);
        CHECK(a.labels.size() == pts.size());
    }
}
