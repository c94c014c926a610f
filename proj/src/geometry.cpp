#include "bridgenav/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace bridgenav {

template <int Dim>
PointN<Dim> mean_of(std::span<const PointN<Dim>> pts)
{
    PointN<Dim> sum = PointN<Dim>::Zero();
    for (const auto& p : pts)
        sum += p;
    if (!pts.empty())
        sum /= static_cast<double>(pts.size());
    return sum;
}

template Point2 mean_of<2>(std::span<const Point2>);
template Point3 mean_of<3>(std::span<const Point3>);

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b)
{
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

template <typename P>
std::pair<std::size_t, std::size_t> brute_farthest(std::span<const P> pts,
                                                   std::span<const std::size_t> idx)
{
    std::pair<std::size_t, std::size_t> best{idx.front(), idx.front()};
    double best_d = -1.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            const double d = (pts[idx[a]] - pts[idx[b]]).squaredNorm();
            if (d > best_d) {
                best_d = d;
                best = {idx[a], idx[b]};
            }
        }
    }
    return best;
}

} // namespace

std::vector<std::size_t> convex_hull(std::span<const Point2> pts)
{
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a].x() != pts[b].x())
            return pts[a].x() < pts[b].x();
        if (pts[a].y() != pts[b].y())
            return pts[a].y() < pts[b].y();
        return a < b;
    });
    // keep the lowest index among exact duplicates
    order.erase(std::unique(order.begin(), order.end(),
                            [&](std::size_t a, std::size_t b) { return pts[a] == pts[b]; }),
                order.end());
    if (order.size() < 3)
        return order;

    std::vector<std::size_t> hull(2 * order.size());
    std::size_t k = 0;
    for (std::size_t i : order) {
        while (k >= 2 && cross(pts[hull[k - 2]], pts[hull[k - 1]], pts[i]) <= 0)
            --k;
        hull[k++] = i;
    }
    const std::size_t lower = k + 1;
    for (auto it = order.rbegin() + 1; it != order.rend(); ++it) {
        while (k >= lower && cross(pts[hull[k - 2]], pts[hull[k - 1]], pts[*it]) <= 0)
            --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

std::pair<std::size_t, std::size_t> farthest_pair(std::span<const Point2> pts)
{
    if (pts.size() == 1)
        return {0, 0};
    // Both ends of a farthest pair are hull vertices.
    auto hull = convex_hull(pts);
    std::sort(hull.begin(), hull.end());
    return brute_farthest<Point2>(pts, hull);
}

std::pair<std::size_t, std::size_t> farthest_pair(std::span<const Point3> pts)
{
    if (pts.size() == 1)
        return {0, 0};
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return brute_farthest<Point3>(pts, idx);
}

double diameter(std::span<const Point2> pts)
{
    if (pts.size() < 2)
        return 0.0;
    auto [a, b] = farthest_pair(pts);
    return (pts[a] - pts[b]).norm();
}

template <int Dim>
std::vector<std::size_t> k_nearest(std::span<const PointN<Dim>> pts, const PointN<Dim>& q,
                                   std::size_t k)
{
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        d.emplace_back((pts[i] - q).squaredNorm(), i);
    k = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i)
        out[i] = d[i].second;
    return out;
}

template std::vector<std::size_t> k_nearest<2>(std::span<const Point2>, const Point2&, std::size_t);
template std::vector<std::size_t> k_nearest<3>(std::span<const Point3>, const Point3&, std::size_t);

double median_nn_spacing(std::span<const Point2> pts)
{
    const std::size_t n = pts.size();
    if (n < 2)
        return 0.0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pts[a].x() < pts[b].x(); });

    std::vector<double> nn(n, std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < n; ++r) {
        const Point2& p = pts[order[r]];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = r + 1; s < n; ++s) {
            const double dx = pts[order[s]].x() - p.x();
            if (dx * dx >= best)
                break;
            best = std::min(best, (pts[order[s]] - p).squaredNorm());
        }
        for (std::size_t s = r; s-- > 0;) {
            const double dx = p.x() - pts[order[s]].x();
            if (dx * dx >= best)
                break;
            best = std::min(best, (pts[order[s]] - p).squaredNorm());
        }
        nn[r] = std::sqrt(best);
    }
    auto mid = nn.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(nn.begin(), mid, nn.end());
    return *mid;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b)
{
    const Point2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0)
        return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double wrap_angle(double a)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi)
        a += two_pi;
    else if (a > std::numbers::pi)
        a -= two_pi;
    return a;
}

} // namespace bridgenav
