#include "bridgenav/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <tuple>

namespace bridgenav {

namespace {

constexpr double kPi = std::numbers::pi;

double quantile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    const auto i = static_cast<std::size_t>(std::lround(q * static_cast<double>(v.size() - 1)));
    return v[i];
}

Boundary tile_boundary(const Points2& pts, double alpha_s)
{
    Boundary b = ncbe(pts, alpha_s);
    b.center = mean_of<2>(pts);
    return b;
}

double config_distance(const Config& a, const Config& b, double theta_weight)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double dt = theta_weight * wrap_angle(b.theta - a.theta);
    return std::sqrt(dx * dx + dy * dy + dt * dt);
}

Config lerp(const Config& a, double dx, double dy, double dt, double f)
{
    return {a.x + f * dx, a.y + f * dy, wrap_angle(a.theta + f * dt)};
}

std::size_t pieces(double dpos, double dtheta, double pos_step, double theta_step)
{
    const double n = std::max(std::ceil(dpos / pos_step), std::ceil(std::abs(dtheta) / theta_step));
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

struct Checker {
    std::span<const Boundary> boundaries;
    const Footprint& fp;
    const PibcParams& pibc;
    const RrtParams& params;

    bool valid(const Config& c) const { return pibc_check(boundaries, c, fp, pibc); }

    /// Intermediate configs at most step/2 (and theta_step/2) apart; a is assumed valid.
    bool motion_valid(const Config& a, const Config& b) const
    {
        const double dx = b.x - a.x, dy = b.y - a.y, dt = wrap_angle(b.theta - a.theta);
        const std::size_t n = pieces(std::hypot(dx, dy), dt, params.step / 2.0, params.theta_step / 2.0);
        for (std::size_t i = 1; i <= n; ++i)
            if (!valid(lerp(a, dx, dy, dt, static_cast<double>(i) / static_cast<double>(n))))
                return false;
        return true;
    }
};

double heading(const Point2& from, const Point2& to)
{
    const Point2 d = to - from;
    if (d.squaredNorm() == 0.0)
        return 0.0;
    return wrap_angle(std::atan2(d.y(), d.x()));
}

} // namespace

Footprint Footprint::rectangle(double width, double length)
{
    if (!(width > 0.0) || !(length > 0.0))
        throw Error(Errc::InvalidArgument, "footprint dimensions must be positive");
    Footprint fp;
    fp.width = width;
    fp.length = length;
    const double hl = length / 2.0, hw = width / 2.0;
    fp.offsets = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}, {0.0, hw}, {-hl, 0.0}, {0.0, -hw}, {hl, 0.0}, {0.0, 0.0}};
    return fp;
}

Points2 footprint_points(const Config& c, const Footprint& fp)
{
    const double cs = std::cos(c.theta), sn = std::sin(c.theta);
    Points2 out;
    out.reserve(fp.offsets.size());
    for (const auto& o : fp.offsets)
        out.emplace_back(c.x + cs * o.x() - sn * o.y(), c.y + sn * o.x() + cs * o.y());
    return out;
}

bool pibc_check(std::span<const Boundary> boundaries, const Config& c, const Footprint& fp,
                const PibcParams& params)
{
    if (boundaries.empty())
        throw Error(Errc::EmptyBoundaries, "collision check needs at least one boundary");
    if (params.n_candidates == 0)
        throw Error(Errc::InvalidArgument, "n_candidates must be at least 1");
    const std::size_t n = std::min(params.n_candidates, boundaries.size());
    std::vector<std::pair<double, std::size_t>> ranked(boundaries.size());
    for (const Point2& p : footprint_points(c, fp)) {
        for (std::size_t i = 0; i < boundaries.size(); ++i)
            ranked[i] = {(boundaries[i].center - p).squaredNorm(), i};
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end());
        bool inside = false;
        for (std::size_t r = 0; r < n && !inside; ++r) {
            const Boundary& b = boundaries[ranked[r].second];
            inside = !b.empty() && point_in_boundary(b, p, params.m, params.rule);
        }
        if (!inside)
            return false;
    }
    return true;
}

std::vector<Boundary> navigation_boundaries(const ClusterSet& cs, double alpha_s)
{
    Points2 all;
    for (const auto& c : cs.clusters)
        all.insert(all.end(), c.points.begin(), c.points.end());

    std::vector<Boundary> out;
    for (const auto& c : cs.clusters) {
        if (c.points.size() < 3)
            continue;
        PrincipalLine line;
        try {
            line = fit_principal_line(c.points);
        } catch (const Error&) {
            continue;
        }
        const Point2 d = line.direction;
        const Point2 nrm(-d.y(), d.x());
        std::vector<double> ts, us;
        for (const auto& p : c.points) {
            ts.push_back((p - line.point).dot(d));
            us.push_back((p - line.point).dot(nrm));
        }
        const double u_lo = quantile(us, 0.01), u_hi = quantile(us, 0.99);
        const double t_lo = quantile(ts, 0.01), t_hi = quantile(ts, 0.99);
        const double width = u_hi - u_lo;
        if (!(width > 0.0) || t_hi - t_lo < 1.2 * width) {
            out.push_back(tile_boundary(c.points, alpha_s));
            continue;
        }

        // Slab of the whole cloud along this cluster's axis.
        const double s_lo = t_lo - width, s_hi = t_hi + width;
        std::vector<std::pair<double, Point2>> slab;
        for (const auto& p : all) {
            const double t = (p - line.point).dot(d);
            const double u = (p - line.point).dot(nrm);
            if (u >= u_lo && u <= u_hi && t >= s_lo && t <= s_hi)
                slab.emplace_back(t, p);
        }
        const double tile = 2.0 * width, stride = width / 4.0;
        for (double s = s_lo;; s += stride) {
            const double e = std::min(s + tile, s_hi);
            Points2 pts;
            for (const auto& [t, p] : slab)
                if (t >= s && t <= e)
                    pts.push_back(p);
            if (pts.size() >= 10)
                out.push_back(tile_boundary(pts, alpha_s));
            if (e >= s_hi)
                break;
        }
    }
    return out;
}

RrtParams RrtParams::for_footprint(const Footprint& fp)
{
    RrtParams p;
    p.step = fp.width / 2.0;
    p.goal_tol = fp.width / 4.0;
    return p;
}

MotionPath rrt_plan(const Config& start, const Config& goal, std::span<const Boundary> boundaries,
                    const Footprint& fp, const PibcParams& pibc, const RrtParams& params,
                    std::uint64_t seed)
{
    if (boundaries.empty())
        throw Error(Errc::EmptyBoundaries, "planning needs at least one boundary");
    if (!(params.step > 0.0) || !(params.theta_step > 0.0) || !(params.goal_tol >= 0.0) ||
        !(params.goal_bias >= 0.0 && params.goal_bias <= 1.0) || params.max_iters < 0)
        throw Error(Errc::InvalidArgument, "invalid RRT parameters");
    const Checker check{boundaries, fp, pibc, params};
    if (!check.valid(start))
        throw Error(Errc::StartInvalid, "start configuration fails the inside check");
    if (!check.valid(goal))
        throw Error(Errc::GoalInvalid, "goal configuration fails the inside check");

    MotionPath path;
    const Config s{start.x, start.y, wrap_angle(start.theta)};
    const Config g{goal.x, goal.y, wrap_angle(goal.theta)};

    double x_lo = std::min(s.x, g.x), x_hi = std::max(s.x, g.x);
    double y_lo = std::min(s.y, g.y), y_hi = std::max(s.y, g.y);
    for (const auto& b : boundaries)
        for (const auto& p : b.points) {
            x_lo = std::min(x_lo, p.x());
            x_hi = std::max(x_hi, p.x());
            y_lo = std::min(y_lo, p.y());
            y_hi = std::max(y_hi, p.y());
        }

    std::vector<Config> nodes{s};
    std::vector<int> parent{-1};

    // Success once node i is within goal_tol of the goal position. The exact
    // goal is appended when the straight motion to it is valid.
    auto try_finish = [&](std::size_t i) {
        const Config& a = nodes[i];
        if (std::hypot(g.x - a.x, g.y - a.y) > params.goal_tol)
            return false;
        for (int j = static_cast<int>(i); j >= 0; j = parent[static_cast<std::size_t>(j)])
            path.configs.push_back(nodes[static_cast<std::size_t>(j)]);
        std::reverse(path.configs.begin(), path.configs.end());
        if (config_distance(a, g, 1.0) == 0.0 || !check.motion_valid(a, g))
            return true;
        const double dx = g.x - a.x, dy = g.y - a.y, dt = wrap_angle(g.theta - a.theta);
        const std::size_t n = pieces(std::hypot(dx, dy), dt, params.step, params.theta_step);
        for (std::size_t k = 1; k < n; ++k)
            path.configs.push_back(lerp(a, dx, dy, dt, static_cast<double>(k) / static_cast<double>(n)));
        path.configs.push_back(g);
        return true;
    };

    if (try_finish(0))
        return path;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int it = 0; it < params.max_iters; ++it) {
        Config q;
        if (unit(rng) < params.goal_bias) {
            q = g;
        } else {
            q.x = x_lo + unit(rng) * (x_hi - x_lo);
            q.y = y_lo + unit(rng) * (y_hi - y_lo);
            q.theta = wrap_angle(-kPi + unit(rng) * 2.0 * kPi);
        }
        std::size_t near = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double dist = config_distance(nodes[i], q, params.theta_weight);
            if (dist < best) {
                best = dist;
                near = i;
            }
        }
        const Config& a = nodes[near];
        const double dx = q.x - a.x, dy = q.y - a.y, dt = wrap_angle(q.theta - a.theta);
        const double dpos = std::hypot(dx, dy);
        double f = 1.0;
        if (dpos > 0.0)
            f = std::min(f, params.step / dpos);
        if (dt != 0.0)
            f = std::min(f, params.theta_step / std::abs(dt));
        if (dpos * f < 1e-9 && std::abs(dt) * f < 1e-9)
            continue;
        const Config next = lerp(a, dx, dy, dt, f);
        if (!check.valid(next) || !check.motion_valid(a, next))
            continue;
        nodes.push_back(next);
        parent.push_back(static_cast<int>(near));
        if (try_finish(nodes.size() - 1))
            return path;
    }
    throw Error(Errc::NoPathFound, "no path after " + std::to_string(params.max_iters) + " iterations");
}

Config via_config(const RoutePlan& route, const StructureGraph& g, std::size_t k,
                  std::span<const Boundary> boundaries, const Footprint& fp, const PibcParams& pibc,
                  const RrtParams& params)
{
    const auto& walk = route.walk;
    if (k >= walk.size())
        throw Error(Errc::InvalidArgument, "walk position out of range");
    auto pos = [&](std::size_t i) { return g.vertices[static_cast<std::size_t>(walk[i])].pos; };
    const Point2 here = pos(k);
    if (walk.size() == 1)
        return {here.x(), here.y(), 0.0};
    const Point2 other = k + 1 < walk.size() ? pos(k + 1) : pos(k - 1);
    const double theta = k + 1 < walk.size() ? heading(here, other) : heading(other, here);

    Config c{here.x(), here.y(), theta};
    const Checker check{boundaries, fp, pibc, params};
    if (check.valid(c))
        return c;
    const double len = (other - here).norm();
    if (len == 0.0)
        return c;
    // Nearest valid position on a step/4 grid aligned with the edge, within
    // half the edge length ahead of the vertex and to either side of it.
    const Point2 dir = (other - here) / len;
    const Point2 side(-dir.y(), dir.x());
    const double inc = params.step / 4.0;
    const auto reach = static_cast<int>(std::floor(len / 2.0 / inc));
    std::vector<std::tuple<double, int, int>> grid;
    for (int a = 0; a <= reach; ++a)
        for (int b = -reach; b <= reach; ++b)
            if (a != 0 || b != 0)
                grid.emplace_back(std::hypot(a, b), a, b);
    std::sort(grid.begin(), grid.end());
    auto at = [&](double a, double b) {
        const Point2 p = here + inc * (a * dir + b * side);
        return Config{p.x(), p.y(), theta};
    };
    // Prefer a via whose grid neighbours are valid too, so the planner is not
    // asked to hit an isolated pocket.
    std::optional<Config> fallback;
    for (const auto& [r, a, b] : grid) {
        const Config moved = at(a, b);
        if (!check.valid(moved))
            continue;
        if (check.valid(at(a + 1, b)) && check.valid(at(a - 1, b)) && check.valid(at(a, b + 1)) &&
            check.valid(at(a, b - 1)))
            return moved;
        if (!fallback)
            fallback = moved;
    }
    return fallback.value_or(c);
}

RouteMotion plan_route(const RoutePlan& route, const StructureGraph& g, std::span<const Boundary> boundaries,
                       const Footprint& fp, const PibcParams& pibc, const RrtParams& params,
                       std::uint64_t seed)
{
    for (int v : route.walk)
        if (v < 0 || static_cast<std::size_t>(v) >= g.vertices.size())
            throw Error(Errc::UnknownVertex, "route visits vertex " + std::to_string(v) + " not in the graph");

    RouteMotion out;
    if (route.walk.size() < 2)
        return out;
    Config start = via_config(route, g, 0, boundaries, fp, pibc, params);
    for (std::size_t k = 0; k + 1 < route.walk.size(); ++k) {
        const int u = route.walk[k], v = route.walk[k + 1];
        const Config goal = via_config(route, g, k + 1, boundaries, fp, pibc, params);
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(k)};
        std::array<std::uint32_t, 2> words{};
        seq.generate(words.begin(), words.end());
        const std::uint64_t edge_seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
        try {
            MotionPath path = rrt_plan(start, goal, boundaries, fp, pibc, params, edge_seed);
            path.step = k;
            path.u = u;
            path.v = v;
            start = path.configs.back();
            out.paths.push_back(std::move(path));
        } catch (const Error& e) {
            out.failures.push_back({k, u, v, e.code(), e.what()});
            // The next edge starts from the planned via, as if this edge had been traversed.
            start = goal;
        }
    }
    return out;
}

} // namespace bridgenav
