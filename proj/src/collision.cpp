#include "bimanip/collision.hpp"

#include <cmath>

namespace bimanip {

bool obb_overlap(const Obb& a, const Obb& b, double contact_eps) {
    // Ericson, Real-Time Collision Detection, section 4.4. R expresses b's
    // axes in a's frame; 15 candidate separating axes.
    Mat3 r = a.axes.transpose() * b.axes;
    Mat3 abs_r = r.cwiseAbs() + Mat3::Constant(1e-12);  // guard parallel-axis cross products
    const Vec3 t = a.axes.transpose() * (b.center - a.center);

    // a's face axes
    for (int i = 0; i < 3; ++i) {
        const double ra = a.half[i];
        const double rb = abs_r.row(i).dot(b.half);
        if (std::abs(t[i]) > ra + rb - contact_eps) return false;
    }
    // b's face axes
    for (int j = 0; j < 3; ++j) {
        const double ra = abs_r.col(j).dot(a.half);
        const double rb = b.half[j];
        if (std::abs(t.dot(r.col(j))) > ra + rb - contact_eps) return false;
    }
    // cross products a_i x b_j; the projections are onto the non-normalized
    // axis a_i x b_j of length sqrt(1 - r(i,j)^2), so the contact tolerance
    // scales with that length and near-parallel axes (length ~ 0, covered by
    // the face axes anyway) are skipped.
    for (int i = 0; i < 3; ++i) {
        const int i1 = (i + 1) % 3, i2 = (i + 2) % 3;
        for (int j = 0; j < 3; ++j) {
            const double len2 = std::max(0.0, 1.0 - r(i, j) * r(i, j));
            if (len2 < 1e-12) continue;
            const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            const double ra = a.half[i1] * abs_r(i2, j) + a.half[i2] * abs_r(i1, j);
            const double rb = b.half[j1] * abs_r(i, j2) + b.half[j2] * abs_r(i, j1);
            const double dist = std::abs(t[i2] * r(i1, j) - t[i1] * r(i2, j));
            if (dist > ra + rb - contact_eps * std::sqrt(len2)) return false;
        }
    }
    return true;
}

}  // namespace bimanip
