#pragma once

#include <random>
#include <vector>

#include "dnls/linops.hpp"

namespace dnls::test {

inline VectorXd random_vector(int len, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    VectorXd v(len);
    for (int i = 0; i < len; ++i) v(i) = u(rng);
    return v;
}

inline VectorXcd random_cvector(int len, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    VectorXcd v(len);
    for (int i = 0; i < len; ++i) v(i) = Complex(u(rng), u(rng));
    return v;
}

// unit vector in Range(P)
inline VectorXd random_normal_direction(const LinearPack& pack, std::mt19937_64& rng) {
    VectorXd v = pack.P * random_vector(static_cast<int>(pack.P.rows()), rng);
    return v.normalized();
}

// least-squares slope of log(y) against log(x)
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t m = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(m);
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace dnls::test
