#pragma once

#include <algorithm>
#include <string>

namespace skyflux {

enum class Category {
    MovingVehicle,
    StationaryVehicleOrFalse,
    OtherMovingOrFalse,
    Building,
    Vehicle, // raw ingested detection
    GroundTruth,
};

std::string to_string(Category c);
Category category_from_string(const std::string& s);

/// Axis-aligned box, top-left anchored, in pixels.
struct BBox {
    double x = 0, y = 0, w = 0, h = 0;
    Category category = Category::Vehicle;
    double confidence = 1.0;
    int frame_index = 0;

    double area() const { return w * h; }
    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }

    bool contains(double px, double py) const {
        return px >= x && px <= x + w && py >= y && py <= y + h;
    }

    /// Clamp to [0,width)x[0,height); boxes fully outside collapse to w=h=0.
    BBox clamped(int width, int height) const {
        BBox r = *this;
        double x1 = std::min(x + w, static_cast<double>(width));
        double y1 = std::min(y + h, static_cast<double>(height));
        r.x = std::max(0.0, x);
        r.y = std::max(0.0, y);
        r.w = std::max(0.0, x1 - r.x);
        r.h = std::max(0.0, y1 - r.y);
        return r;
    }
};

inline double intersection_area(const BBox& a, const BBox& b) {
    double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    return ix * iy;
}

inline double iou(const BBox& a, const BBox& b) {
    double inter = intersection_area(a, b);
    double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

} // namespace skyflux
