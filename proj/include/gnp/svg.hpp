#pragma once

#include "gnp/common.hpp"

#include <string>
#include <vector>

namespace gnp::svg {

/// Minimal SVG 1.1 writer with a world-to-screen mapping (y up in world
/// coordinates, y down on screen). Numbers are emitted at fixed precision
/// so repeated runs produce identical bytes.
class Document {
public:
    Document(double width_px, double height_px, double world_x0, double world_x1, double world_y0,
             double world_y1, double margin_px = 40.0);

    void polyline(const std::vector<Vec2>& points, const std::string& color, double width_px,
                  bool dashed = false);
    void line(const Vec2& a, const Vec2& b, const std::string& color, double width_px,
              bool dashed = false);
    void circle(const Vec2& center, double radius_px, const std::string& color);
    /// Arrow whose length is proportional to |to - from| in world units.
    void arrow(const Vec2& from, const Vec2& to, const std::string& color, double width_px);
    void text(const Vec2& anchor, const std::string& content, int size_px,
              const std::string& color = "#333333");

    std::string str() const;
    void save(const std::string& path) const;

private:
    Vec2 to_screen(const Vec2& world) const;
    double width_, height_, margin_;
    double x0_, x1_, y0_, y1_;
    std::vector<std::string> elements_;
};

}  // namespace gnp::svg
