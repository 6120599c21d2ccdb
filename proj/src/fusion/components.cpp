#include "skyflux/fusion/components.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace skyflux::fusion {

namespace {

// Two-pass union-find labeling.
struct UnionFind {
    std::vector<int> parent;

    int make() {
        parent.push_back(static_cast<int>(parent.size()));
        return parent.back();
    }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

std::vector<Component> connected_components(const BinaryMask& mask, double min_area) {
    const int w = mask.width, h = mask.height;
    std::vector<int> label(static_cast<size_t>(w) * h, -1);
    UnionFind uf;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y))
                continue;
            // Already-labeled 8-neighbors: W, NW, N, NE.
            int neigh[4] = {-1, -1, -1, -1};
            if (x > 0 && mask.at(x - 1, y)) neigh[0] = label[y * w + x - 1];
            if (x > 0 && y > 0 && mask.at(x - 1, y - 1)) neigh[1] = label[(y - 1) * w + x - 1];
            if (y > 0 && mask.at(x, y - 1)) neigh[2] = label[(y - 1) * w + x];
            if (x + 1 < w && y > 0 && mask.at(x + 1, y - 1)) neigh[3] = label[(y - 1) * w + x + 1];

            int lab = -1;
            for (int n : neigh)
                if (n >= 0)
                    lab = lab < 0 ? n : std::min(lab, n);
            if (lab < 0)
                lab = uf.make();
            label[y * w + x] = lab;
            for (int n : neigh)
                if (n >= 0)
                    uf.unite(lab, n);
        }
    }

    // Second pass: resolve roots, bucket pixels in scan order.
    std::map<int, Component> by_root;
    std::vector<int> root_order;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int lab = label[y * w + x];
            if (lab < 0)
                continue;
            int root = uf.find(lab);
            auto [it, inserted] = by_root.try_emplace(root);
            if (inserted)
                root_order.push_back(root);
            it->second.pixels.push_back(y * w + x);
        }

    std::vector<Component> out;
    for (int root : root_order) {
        Component& c = by_root[root];
        if (static_cast<double>(c.pixels.size()) < min_area)
            continue;
        int minx = w, miny = h, maxx = -1, maxy = -1;
        double sx = 0, sy = 0;
        for (int p : c.pixels) {
            int x = p % w, y = p / w;
            minx = std::min(minx, x);
            maxx = std::max(maxx, x);
            miny = std::min(miny, y);
            maxy = std::max(maxy, y);
            sx += x + 0.5;
            sy += y + 0.5;
        }
        c.bbox.x = minx;
        c.bbox.y = miny;
        c.bbox.w = maxx - minx + 1;
        c.bbox.h = maxy - miny + 1;
        c.centroid_x = sx / c.pixels.size();
        c.centroid_y = sy / c.pixels.size();
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace skyflux::fusion
