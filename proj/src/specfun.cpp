#include "hbem/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hbem::specfun {

namespace {

constexpr double euler_gamma = 0.57721566490153286061;
constexpr double eps = std::numeric_limits<double>::epsilon();
constexpr int max_cf_iterations = 20000;

void check_quadrant(cplx z) {
    const double r = std::abs(z);
    if (r == 0.0) {
        throw std::domain_error("hankel: logarithmic singularity at z = 0");
    }
    const double slack = 1e-14 * r;
    if (z.real() < -slack || z.imag() < -slack || !std::isfinite(r)) {
        throw std::domain_error("hankel: argument outside the closed first quadrant");
    }
}

// Power-series coefficient tables in (-z^2/4)^k.
struct SeriesTables {
    static constexpr int size = 48;
    double j0[size];   // 1 / (k!)^2
    double y0[size];   // H_k / (k!)^2
    double j1[size];   // 1 / (k! (k+1)!)
    double y1[size];   // (psi(k+1) + psi(k+2)) / (k! (k+1)!)

    SeriesTables() {
        double fact = 1.0;
        double harmonic = 0.0;
        for (int k = 0; k < size; ++k) {
            if (k > 0) {
                fact *= k;
                harmonic += 1.0 / k;
            }
            const double harmonic_next = harmonic + 1.0 / (k + 1);
            j0[k] = 1.0 / (fact * fact);
            y0[k] = harmonic * j0[k];
            j1[k] = 1.0 / (fact * fact * (k + 1));
            y1[k] = (harmonic + harmonic_next - 2.0 * euler_gamma) * j1[k];
        }
    }
};

const SeriesTables& tables() {
    static const SeriesTables t;
    return t;
}

// Number of terms so that |q|^n / (n!)^2 falls below 1e-18.
int series_terms(double q_abs) {
    const SeriesTables& t = tables();
    double power = 1.0;
    for (int n = 1; n < SeriesTables::size; ++n) {
        power *= q_abs;
        if (power * t.j1[n] < 1e-18) {
            return n + 1;
        }
    }
    return SeriesTables::size;
}

// Ascending series for J0, Y0, J1, Y1 evaluated by Horner in -z^2/4.
HankelPair series(cplx z) {
    const SeriesTables& t = tables();
    const cplx mq = -0.25 * z * z;
    const double mr = mq.real();
    const double mi = mq.imag();
    const int n = series_terms(std::abs(mq));

    double a_re = t.j0[n - 1], a_im = 0.0;
    double b_re = t.y0[n - 1], b_im = 0.0;
    double c_re = t.j1[n - 1], c_im = 0.0;
    double d_re = t.y1[n - 1], d_im = 0.0;
    for (int k = n - 2; k >= 0; --k) {
        double re = a_re * mr - a_im * mi;
        a_im = a_re * mi + a_im * mr;
        a_re = re + t.j0[k];
        re = b_re * mr - b_im * mi;
        b_im = b_re * mi + b_im * mr;
        b_re = re + t.y0[k];
        re = c_re * mr - c_im * mi;
        c_im = c_re * mi + c_im * mr;
        c_re = re + t.j1[k];
        re = d_re * mr - d_im * mi;
        d_im = d_re * mi + d_im * mr;
        d_re = re + t.y1[k];
    }
    const cplx j0{a_re, a_im};
    const cplx y0_sum{b_re, b_im};
    const cplx j1_sum{c_re, c_im};
    const cplx y1_sum{d_re, d_im};

    const cplx log_half = std::log(0.5 * z);
    const cplx half = 0.5 * z;
    const cplx y0 = (2.0 / pi) * ((log_half + euler_gamma) * j0 - y0_sum);
    const cplx j1 = half * j1_sum;
    const cplx y1 = (2.0 / pi) * j1 * log_half - 2.0 / (pi * z) - (1.0 / pi) * half * y1_sum;
    const cplx i{0.0, 1.0};
    return {j0 + i * y0, j1 + i * y1};
}

// Temme's second continued fraction (Steed's algorithm) for K0 and K1 at
// w = -i z, Re w >= 0; then H0 = -(2i/pi) K0(w) and H1 = -(2/pi) K1(w).
HankelPair continued_fraction(cplx z) {
    const cplx w = cplx{z.imag(), -z.real()};
    cplx b = 2.0 * (1.0 + w);
    cplx d = 1.0 / b;
    cplx h = d;
    cplx delh = d;
    cplx q1 = 0.0;
    cplx q2 = 1.0;
    const double a1 = 0.25;
    cplx q = a1;
    cplx c = a1;
    double a = -a1;
    cplx s = 1.0 + q * delh;
    int it = 1;
    for (; it < max_cf_iterations; ++it) {
        a -= 2.0 * it;
        c = -a * c / (it + 1.0);
        const cplx qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const cplx dels = q * delh;
        s += dels;
        if (std::abs(dels) < eps * std::abs(s)) {
            break;
        }
    }
    if (it == max_cf_iterations) {
        throw std::runtime_error("hankel: continued fraction did not converge");
    }
    h *= a1;
    const cplx k0 = std::sqrt(pi / (2.0 * w)) * std::exp(-w) / s;
    const cplx k1 = k0 * (w + 0.5 - h) / w;
    const cplx i{0.0, 1.0};
    return {-(2.0 / pi) * i * k0, -(2.0 / pi) * k1};
}

}  // namespace

cplx branch_sqrt(cplx z) {
    if (z.real() == 0.0 && z.imag() <= 0.0) {
        throw std::domain_error("branch_sqrt: argument on the cut {-it : t >= 0}");
    }
    cplx r = std::sqrt(z);
    // std::sqrt uses arg in (-pi, pi]; arguments in (-pi, -pi/2] belong to
    // the other sheet for this branch.
    if (z.real() < 0.0 && std::signbit(z.imag())) {
        r = -r;
    }
    return r;
}

HankelPair hankel1_01(cplx z) {
    check_quadrant(z);
    if (std::abs(z) + z.imag() <= series_reach) {
        return series(z);
    }
    return continued_fraction(z);
}

cplx hankel1_0(cplx z) { return hankel1_01(z).h0; }

cplx hankel1_1(cplx z) { return hankel1_01(z).h1; }

}  // namespace hbem::specfun
