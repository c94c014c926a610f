#include "bridgenav/boundary.hpp"

#include "bridgenav/error.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <numeric>
#include <set>

namespace bridgenav {

namespace {

template <int Dim>
std::array<double, Dim> coords(const PointN<Dim>& p)
{
    std::array<double, Dim> c{};
    for (int i = 0; i < Dim; ++i)
        c[static_cast<std::size_t>(i)] = p[i];
    return c;
}

template <int Dim>
BasicBoundary<Dim> ncbe_impl(std::span<const PointN<Dim>> points, double alpha_s)
{
    if (points.empty())
        throw Error(Errc::EmptyInput, "boundary of an empty point set");
    if (!(alpha_s > 0.0) || !std::isfinite(alpha_s))
        throw Error(Errc::InvalidAlpha, "alpha_s must be positive");

    BasicBoundary<Dim> out;
    out.alpha_s = alpha_s;
    out.center = mean_of<Dim>(points);

    std::set<std::array<double, Dim>> seen;
    auto add = [&](std::size_t i) {
        if (seen.insert(coords<Dim>(points[i])).second)
            out.points.push_back(points[i]);
    };

    std::vector<std::size_t> order(points.size());
    PointList<Dim> window;
    std::vector<std::size_t> window_idx;
    for (int axis = 0; axis < Dim; ++axis) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return points[a][axis] < points[b][axis];
        });
        const double lo = points[order.front()][axis];
        const double hi = points[order.back()][axis];
        if ((hi - lo) / alpha_s > 1e7)
            throw Error(Errc::InvalidAlpha, "alpha_s too small for the extent of the data");

        std::size_t first = 0;
        for (long long i = 0;; ++i) {
            const double sl = lo + static_cast<double>(i) * alpha_s;
            const double w_lo = sl - 0.5 * alpha_s;
            const double w_hi = sl + 0.5 * alpha_s;
            if (w_lo > hi)
                break;
            while (first < order.size() && points[order[first]][axis] < w_lo)
                ++first;
            window.clear();
            window_idx.clear();
            for (std::size_t k = first; k < order.size() && points[order[k]][axis] <= w_hi; ++k) {
                window_idx.push_back(order[k]);
            }
            if (window_idx.empty())
                continue;
            // Keep original index order inside the window so ties resolve the same
            // way regardless of the sort.
            std::sort(window_idx.begin(), window_idx.end());
            for (auto k : window_idx)
                window.push_back(points[k]);
            const auto [a, b] = farthest_pair(std::span<const PointN<Dim>>(window));
            add(window_idx[a]);
            add(window_idx[b]);
        }
    }
    return out;
}

} // namespace

Boundary ncbe(std::span<const Point2> points, double alpha_s)
{
    return ncbe_impl<2>(points, alpha_s);
}

Boundary3 ncbe(std::span<const Point3> points, double alpha_s)
{
    return ncbe_impl<3>(points, alpha_s);
}

double default_alpha(std::span<const Point2> points)
{
    const double s = median_nn_spacing(points);
    if (!(s > 0.0))
        throw Error(Errc::InvalidAlpha, "cannot derive alpha_s from coincident points");
    return 5.0 * s;
}

bool point_in_boundary(const Boundary& b, const Point2& p, std::size_t m, InsideRule rule)
{
    if (b.empty())
        throw Error(Errc::EmptyBoundary, "inside test against an empty boundary");
    if (m == 0)
        throw Error(Errc::InvalidArgument, "m must be at least 1");
    const double d_s = (p - b.center).norm();
    const auto nearest = k_nearest<2>(b.points, p, m);
    if (rule == InsideRule::All) {
        for (auto i : nearest)
            if (!(d_s < (b.points[i] - b.center).norm()))
                return false;
        return true;
    }
    for (auto i : nearest)
        if (d_s < (b.points[i] - b.center).norm())
            return true;
    return false;
}

Border cluster_border(const Boundary& a, const Boundary& b, double eps_border)
{
    if (!(eps_border > 0.0))
        throw Error(Errc::InvalidArgument, "eps_border must be positive");
    Border out;
    const double eps2 = eps_border * eps_border;
    auto near_any = [eps2](const Point2& p, const Points2& others) {
        return std::any_of(others.begin(), others.end(),
                           [&](const Point2& q) { return (p - q).squaredNorm() <= eps2; });
    };
    for (const auto& p : a.points)
        if (near_any(p, b.points))
            out.points.push_back(p);
    for (const auto& q : b.points)
        if (near_any(q, a.points))
            out.points.push_back(q);
    out.length = diameter(out.points);
    out.midpoint = mean_of<2>(out.points);
    return out;
}

bool are_neighbors(const Border& border, double l_b)
{
    if (!(l_b > 0.0))
        throw Error(Errc::InvalidArgument, "l_b must be positive");
    return border.length >= l_b;
}

} // namespace bridgenav
