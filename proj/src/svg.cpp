#include "gnp/svg.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gnp::svg {

namespace {
std::string num(double v) { return fmt_fixed(v, 2); }

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}
}  // namespace

Document::Document(double width_px, double height_px, double world_x0, double world_x1,
                   double world_y0, double world_y1, double margin_px)
    : width_(width_px), height_(height_px), margin_(margin_px), x0_(world_x0), x1_(world_x1),
      y0_(world_y0), y1_(world_y1) {
    if (x1_ <= x0_) x1_ = x0_ + 1.0;
    if (y1_ <= y0_) y1_ = y0_ + 1.0;
}

Vec2 Document::to_screen(const Vec2& world) const {
    const double sx = (width_ - 2 * margin_) / (x1_ - x0_);
    const double sy = (height_ - 2 * margin_) / (y1_ - y0_);
    return {margin_ + (world.x() - x0_) * sx, height_ - margin_ - (world.y() - y0_) * sy};
}

void Document::polyline(const std::vector<Vec2>& points, const std::string& color, double width_px,
                        bool dashed) {
    if (points.size() < 2) return;
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << num(width_px)
       << "\"";
    if (dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec2 s = to_screen(points[i]);
        if (i) os << ' ';
        os << num(s.x()) << ',' << num(s.y());
    }
    os << "\"/>";
    elements_.push_back(os.str());
}

void Document::line(const Vec2& a, const Vec2& b, const std::string& color, double width_px,
                    bool dashed) {
    const Vec2 sa = to_screen(a), sb = to_screen(b);
    std::ostringstream os;
    os << "<line x1=\"" << num(sa.x()) << "\" y1=\"" << num(sa.y()) << "\" x2=\"" << num(sb.x())
       << "\" y2=\"" << num(sb.y()) << "\" stroke=\"" << color << "\" stroke-width=\""
       << num(width_px) << "\"";
    if (dashed) os << " stroke-dasharray=\"6 4\"";
    os << "/>";
    elements_.push_back(os.str());
}

void Document::circle(const Vec2& center, double radius_px, const std::string& color) {
    const Vec2 s = to_screen(center);
    std::ostringstream os;
    os << "<circle cx=\"" << num(s.x()) << "\" cy=\"" << num(s.y()) << "\" r=\"" << num(radius_px)
       << "\" fill=\"" << color << "\"/>";
    elements_.push_back(os.str());
}

void Document::arrow(const Vec2& from, const Vec2& to, const std::string& color, double width_px) {
    const Vec2 sa = to_screen(from), sb = to_screen(to);
    const Vec2 d = sb - sa;
    const double len = d.norm();
    if (len < 1e-9) return;
    line(from, to, color, width_px);
    // triangular head sized relative to the shaft
    const Vec2 dir = d / len;
    const Vec2 ortho(-dir.y(), dir.x());
    const double head = std::min(10.0, 4.0 + len * 0.1);
    const Vec2 tip = sb;
    const Vec2 left = sb - head * dir + 0.5 * head * ortho;
    const Vec2 right = sb - head * dir - 0.5 * head * ortho;
    std::ostringstream os;
    os << "<polygon fill=\"" << color << "\" points=\"" << num(tip.x()) << ',' << num(tip.y()) << ' '
       << num(left.x()) << ',' << num(left.y()) << ' ' << num(right.x()) << ',' << num(right.y())
       << "\"/>";
    elements_.push_back(os.str());
}

void Document::text(const Vec2& anchor, const std::string& content, int size_px,
                    const std::string& color) {
    const Vec2 s = to_screen(anchor);
    std::ostringstream os;
    os << "<text x=\"" << num(s.x()) << "\" y=\"" << num(s.y()) << "\" font-size=\"" << size_px
       << "\" font-family=\"sans-serif\" fill=\"" << color << "\">" << escape(content) << "</text>";
    elements_.push_back(os.str());
}

std::string Document::str() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width_)
       << "\" height=\"" << num(height_) << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_)
       << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\"" << num(height_)
       << "\" fill=\"#ffffff\"/>\n";
    for (const auto& e : elements_) os << e << '\n';
    os << "</svg>\n";
    return os.str();
}

void Document::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << str();
}

}  // namespace gnp::svg
