#include "skyflux/core/homography.hpp"

#include <cmath>

namespace skyflux {

Eigen::Matrix3d Homography::canonicalize(const Eigen::Matrix3d& m) {
    double pivot = 0.0;
    double best = 0.0;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double a = std::abs(m(r, c));
            if (a > best) {
                best = a;
                pivot = m(r, c);
            }
        }
    }
    if (!(best > 0.0) || !std::isfinite(best))
        throw SingularMatrix("Homography: zero or non-finite matrix");
    return m / pivot;
}

Homography normalize_homography(const Eigen::Matrix3d& m) {
    double det = m.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-300)
        throw SingularMatrix("normalize_homography: det(H) = 0");
    return Homography(m);
}

} // namespace skyflux
