#pragma once

// Independent 100-digit ascending-series evaluation of H0^(1) and H1^(1).
// Shares no code with the library.

#include <boost/multiprecision/cpp_complex.hpp>

#include <complex>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_100;
using mpc = boost::multiprecision::cpp_complex_100;

struct Hankel {
    std::complex<double> h0;
    std::complex<double> h1;
};

inline Hankel hankel_series(std::complex<double> zd) {
    const mpc z(mp(zd.real()), mp(zd.imag()));
    const mp pi = boost::math::constants::pi<mp>();
    const mp gamma = boost::math::constants::euler<mp>();
    const mpc half = z / mp(2);
    const mpc q = -half * half;
    mpc j0 = 1, j1 = 0, s0 = 0, s1 = 0;
    mpc term = 1;  // q^k / (k!)^2
    mp hk = 0;
    const mp eps = mp("1e-90");
    for (int k = 0; k < 2000; ++k) {
        if (k > 0) {
            term *= q / mp(k * k);
            hk += mp(1) / mp(k);
            j0 += term;
            s0 += hk * term;
        }
        // J1 series term q^k / (k! (k+1)!) and its harmonic weight H_k + H_{k+1}.
        const mpc t1 = term / mp(k + 1);
        const mp hk1 = hk + mp(1) / mp(k + 1);
        j1 += t1;
        s1 += (hk + hk1) * t1;
        if (k > 10 && abs(term) < eps * abs(j0) && abs(t1) < eps * abs(j1)) break;
    }
    j1 *= half;
    s1 *= half;
    const mpc lg = log(half);
    const mpc y0 = (mp(2) / pi) * ((lg + gamma) * j0 - s0);
    const mpc y1 = (mp(2) / pi) * (lg + gamma) * j1 - mp(2) / (pi * z) - s1 / pi;
    const mpc i(mp(0), mp(1));
    const mpc h0 = j0 + i * y0;
    const mpc h1 = j1 + i * y1;
    return {{static_cast<double>(h0.real()), static_cast<double>(h0.imag())},
            {static_cast<double>(h1.real()), static_cast<double>(h1.imag())}};
}

}  // namespace oracle
