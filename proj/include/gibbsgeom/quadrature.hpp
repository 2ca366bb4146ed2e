#pragma once

#include <cmath>
#include <functional>

namespace gibbsgeom {

// Adaptive Simpson on [a, b] to the given relative tolerance.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol, int max_depth = 28) {
    auto simpson = [&](double lo, double hi, double flo, double fmid, double fhi) {
        return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    };
    struct Rec {
        const F& f;
        double rel_tol;
        double recurse(double lo, double hi, double flo, double fmid, double fhi, double whole,
                       int depth) const {
            const double m = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + m), rm = 0.5 * (m + hi);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - m) / 6.0 * (fmid + 4.0 * frm + fhi);
            const double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * rel_tol * (std::abs(left + right) + 1e-300))
                return left + right + delta / 15.0;
            return recurse(lo, m, flo, flm, fmid, left, depth - 1) +
                   recurse(m, hi, fmid, frm, fhi, right, depth - 1);
        }
    };
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(a, b, fa, fm, fb);
    return Rec{f, rel_tol}.recurse(a, b, fa, fm, fb, whole, max_depth);
}

// 16-node Gauss-Legendre on [0, 1].
template <typename F>
double gauss_legendre_01(const F& f) {
    static constexpr double xs[8] = {0.04750625491881872, 0.14080177538962946,
                                     0.22900838882861369, 0.30893812220132187,
                                     0.37770220417750152, 0.43281560119391587,
                                     0.47228751153661629, 0.49470046749582497};
    static constexpr double ws[8] = {0.09472530522753425, 0.09130170752246179,
                                     0.08457825969750127, 0.07479799440828837,
                                     0.06231448562776694, 0.04757925584124639,
                                     0.03112676196932393, 0.01357622970587705};
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
        acc += ws[i] * (f(0.5 - xs[i]) + f(0.5 + xs[i]));
    }
    return acc;
}

} // namespace gibbsgeom
