#include "bridgenav/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace bridgenav {

using json = nlohmann::ordered_json;

namespace {

constexpr double kWidth = 800.0;
constexpr double kMargin = 30.0;

const std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                              "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

const char* color(long i)
{
    return kPalette[static_cast<std::size_t>(i < 0 ? 0 : i) % kPalette.size()];
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    return s == "-0.00" ? "0.00" : s;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Pt {
    double x = 0.0;
    double y = 0.0;
};

Pt pt(const json& a)
{
    return {a.at(0).get<double>(), a.at(1).get<double>()};
}

// World-to-pixel mapping with y pointing up; sized from the extent of the data.
class Canvas {
public:
    void extend(Pt p)
    {
        lo_.x = std::min(lo_.x, p.x);
        lo_.y = std::min(lo_.y, p.y);
        hi_.x = std::max(hi_.x, p.x);
        hi_.y = std::max(hi_.y, p.y);
    }

    void extend_all(const json& pts)
    {
        for (const auto& p : pts)
            extend(pt(p));
    }

    void begin(const std::string& title)
    {
        if (lo_.x > hi_.x) {
            lo_ = {0.0, 0.0};
            hi_ = {1.0, 1.0};
        }
        const double span = std::max({hi_.x - lo_.x, hi_.y - lo_.y, 1e-9});
        scale_ = (kWidth - 2.0 * kMargin) / span;
        height_ = (hi_.y - lo_.y) * scale_ + 2.0 * kMargin + 20.0;
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
             << num(height_) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(height_) << "\">\n";
        out_ << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
                "markerHeight=\"6\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" "
                "fill=\"#333\"/></marker></defs>\n";
        out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        text_px(kMargin, 18.0, title, 14, "#000");
    }

    Pt map(Pt p) const
    {
        return {kMargin + (p.x - lo_.x) * scale_, height_ - kMargin - (p.y - lo_.y) * scale_};
    }

    double scale() const { return scale_; }

    void dot(Pt p, double r, const char* fill)
    {
        const Pt q = map(p);
        out_ << "<circle cx=\"" << num(q.x) << "\" cy=\"" << num(q.y) << "\" r=\"" << num(r) << "\" fill=\"" << fill
             << "\"/>\n";
    }

    void line(Pt a, Pt b, const char* stroke, double width, bool arrow = false)
    {
        const Pt p = map(a), q = map(b);
        out_ << "<line x1=\"" << num(p.x) << "\" y1=\"" << num(p.y) << "\" x2=\"" << num(q.x) << "\" y2=\""
             << num(q.y) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << '"'
             << (arrow ? " marker-end=\"url(#arrow)\"" : "") << "/>\n";
    }

    void poly(const std::vector<Pt>& pts, bool closed, const char* stroke, double width, const char* fill = "none")
    {
        out_ << '<' << (closed ? "polygon" : "polyline") << " points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Pt q = map(pts[i]);
            out_ << (i ? " " : "") << num(q.x) << ',' << num(q.y);
        }
        out_ << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"/>\n";
    }

    void text(Pt p, const std::string& s, int size, const char* fill)
    {
        const Pt q = map(p);
        text_px(q.x + 3.0, q.y - 3.0, s, size, fill);
    }

    void text_px(double x, double y, const std::string& s, int size, const char* fill)
    {
        out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"" << size
             << "\" fill=\"" << fill << "\">" << escape(s) << "</text>\n";
    }

    std::string finish()
    {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    Pt lo_{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Pt hi_{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    double scale_ = 1.0;
    double height_ = kWidth;
    std::ostringstream out_;
};

const char* kind_color(const std::string& kind)
{
    if (kind == "center")
        return "#d62728";
    if (kind == "border_mid")
        return "#2ca02c";
    return "#1f77b4";
}

void draw_graph(Canvas& c, const json& vertices, const json& edges, const char* stroke)
{
    std::vector<Pt> pos;
    for (const auto& v : vertices)
        pos.push_back({v.at("x").get<double>(), v.at("y").get<double>()});
    for (const auto& e : edges)
        c.line(pos.at(e.at("u").get<std::size_t>()), pos.at(e.at("v").get<std::size_t>()), stroke, 1.5);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const auto& v = vertices[i];
        c.dot(pos[i], 4.0, v.contains("kind") ? kind_color(v.at("kind").get<std::string>()) : "#000");
        c.text(pos[i], std::to_string(v.at("id").get<int>()), 11, "#000");
    }
}

std::vector<Pt> rect_corners(double x, double y, double th, double length, double width)
{
    const double c = std::cos(th), s = std::sin(th), hl = length / 2.0, hw = width / 2.0;
    std::vector<Pt> out;
    for (auto [a, b] : std::array<std::pair<double, double>, 4>{{{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}}})
        out.push_back({x + c * a - s * b, y + s * a + c * b});
    return out;
}

} // namespace

std::string render_cloud_svg(const json& j)
{
    Canvas c;
    c.extend_all(j.at("points"));
    c.begin("Input cloud (" + std::to_string(j.at("count").get<std::size_t>()) + " points, xy projection)");
    for (const auto& p : j.at("points"))
        c.dot(pt(p), 0.8, "#444");
    return c.finish();
}

std::string render_segmentation_svg(const json& j)
{
    Canvas c;
    for (const auto& cl : j.at("clusters"))
        c.extend_all(cl.at("points"));
    c.begin("Segmentation (" + std::to_string(j.at("n_c").get<std::size_t>()) + " clusters)");
    for (const auto& cl : j.at("clusters")) {
        const char* col = color(cl.at("id").get<long>());
        for (const auto& p : cl.at("points"))
            c.dot(pt(p), 0.8, col);
    }
    for (const auto& cl : j.at("clusters"))
        c.text(pt(cl.at("mean")), "C" + std::to_string(cl.at("id").get<int>()), 13, "#000");
    return c.finish();
}

std::string render_boundaries_graph_svg(const json& j)
{
    Canvas c;
    for (const auto& b : j.at("boundaries"))
        c.extend_all(b.at("points"));
    c.begin("Boundaries and structure graph");
    for (const auto& b : j.at("boundaries")) {
        const char* col = color(b.at("cluster").get<long>());
        for (const auto& p : b.at("points"))
            c.dot(pt(p), 1.2, col);
    }
    for (const auto& b : j.at("borders"))
        for (const auto& p : b.at("points"))
            c.dot(pt(p), 1.6, "#000");
    const auto& g = j.at("graph");
    draw_graph(c, g.at("vertices"), g.at("edges"), "#555");
    return c.finish();
}

std::string render_route_svg(const json& j)
{
    Canvas c;
    std::vector<Pt> pos;
    for (const auto& v : j.at("vertices")) {
        pos.push_back({v.at("x").get<double>(), v.at("y").get<double>()});
        c.extend(pos.back());
    }
    c.begin("Route " + std::to_string(j.at("v_s").get<int>()) + " -> " + std::to_string(j.at("v_t").get<int>()) +
            ", length " + num(j.at("total_length").get<double>()) + " m");
    draw_graph(c, j.at("vertices"), j.at("edges"), "#ccc");
    // Repeated traversals of one edge are drawn side by side.
    const double gap = 6.0 / c.scale();
    std::vector<int> seen(j.at("edges").size(), 0);
    for (const auto& s : j.at("steps")) {
        const Pt a = pos.at(s.at("u").get<std::size_t>()), b = pos.at(s.at("v").get<std::size_t>());
        const auto base = s.at("base_edge").get<std::size_t>();
        const int k = seen.at(base)++;
        const double dx = b.x - a.x, dy = b.y - a.y, len = std::max(std::hypot(dx, dy), 1e-12);
        const double off = gap * (k + 1) * (k % 2 ? -1.0 : 1.0);
        const Pt n{-dy / len * off, dx / len * off};
        const Pt p{a.x + n.x + dx * 0.15, a.y + n.y + dy * 0.15};
        const Pt q{a.x + n.x + dx * 0.85, a.y + n.y + dy * 0.85};
        c.line(p, q, s.at("duplicate").get<bool>() ? "#d62728" : "#333", 1.5, true);
        c.text({(p.x + q.x) / 2.0, (p.y + q.y) / 2.0}, std::to_string(s.at("step").get<int>() + 1), 10, "#d62728");
    }
    return c.finish();
}

std::string render_motion_svg(const json& j)
{
    Canvas c;
    for (const auto& t : j.at("tiles"))
        c.extend_all(t.at("points"));
    for (const auto& p : j.at("paths"))
        c.extend_all(p.at("configs"));
    const std::size_t n_fail = j.at("failures").size();
    c.begin("Motion paths (" + std::to_string(j.at("paths").size()) + " planned, " + std::to_string(n_fail) +
            " failed)");
    for (const auto& t : j.at("tiles"))
        for (const auto& p : t.at("points"))
            c.dot(pt(p), 0.8, "#bbb");
    const double w = j.at("footprint").at("width").get<double>(), l = j.at("footprint").at("length").get<double>();
    for (const auto& path : j.at("paths")) {
        const char* col = color(path.at("step").get<long>());
        std::vector<Pt> line;
        for (const auto& q : path.at("configs"))
            line.push_back(pt(q));
        c.poly(line, false, col, 1.5);
        const auto& cfg = path.at("configs");
        for (std::size_t i = 0; i < cfg.size(); i += 10) {
            const auto& q = cfg[i];
            c.poly(rect_corners(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(), l, w), true,
                   col, 0.6);
        }
    }
    double y = 36.0;
    for (const auto& f : j.at("failures")) {
        c.text_px(kMargin, y, "failed step " + std::to_string(f.at("step").get<int>()) + ": " +
                  f.at("code").get<std::string>(), 11, "#d62728");
        y += 14.0;
    }
    return c.finish();
}

std::string render_switching_svg(const json& j)
{
    const auto& view = j.at("view");
    const auto o = view.at("origin"), e1 = view.at("e1"), e2 = view.at("e2");
    auto project = [&](const json& p) {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const double d = p.at(i).get<double>() - o.at(i).get<double>();
            a += d * e1.at(i).get<double>();
            b += d * e2.at(i).get<double>();
        }
        return Pt{a, b};
    };
    Canvas c;
    for (const auto& p : j.at("boundary"))
        c.extend(project(p));
    for (const auto& cand : j.at("candidates"))
        for (const auto& p : cand.at("test_points"))
            c.extend(project(p));
    c.begin("Switching: mode " + j.at("mode").get<std::string>());
    for (const auto& p : j.at("boundary"))
        c.dot(project(p), 1.2, "#444");
    for (const auto& cand : j.at("candidates")) {
        const auto& tp = cand.at("test_points");
        std::vector<Pt> corners;
        for (std::size_t i = 0; i < 4; ++i)
            corners.push_back(project(tp.at(i)));
        const bool ok = cand.at("accepted").get<bool>();
        c.poly(corners, true, ok ? "#2ca02c" : "#ff7f0e", ok ? 2.0 : 0.8);
        for (std::size_t i = 0; i < tp.size(); ++i)
            c.dot(project(tp[i]), 2.5, cand.at("passed").at(i).get<bool>() ? "#2ca02c" : "#d62728");
        c.dot(project(cand.at("anchor")), 3.0, "#1f77b4");
    }
    if (!j.at("pose").is_null()) {
        const auto& pose = j.at("pose");
        const Pt p = project(pose.at("position"));
        const auto& pos = pose.at("position");
        for (const auto& [axis, col] : {std::pair{"e_x", "#d62728"}, std::pair{"e_y", "#2ca02c"}}) {
            json tip = json::array();
            for (std::size_t i = 0; i < 3; ++i)
                tip.push_back(pos.at(i).get<double>() + 0.1 * pose.at(axis).at(i).get<double>());
            c.line(p, project(tip), col, 2.0, true);
        }
    }
    const std::string flags = std::string("S_pa=") + (j.at("s_pa").get<bool>() ? "1" : "0") +
                              " S_am=" + (j.at("s_am").get<bool>() ? "1" : "0") +
                              " S_hc=" + (j.at("s_hc").get<bool>() ? "1" : "0");
    c.text_px(kMargin, 36.0, flags, 12, "#000");
    return c.finish();
}

} // namespace bridgenav
