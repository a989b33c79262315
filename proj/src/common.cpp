#include "cavlink/common.hpp"

#include <cmath>

namespace cavlink {

void fft_inplace(std::vector<Complex>& x, bool inverse) {
    const size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("FFT size must be a power of two");

    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / double(len);
        const Complex wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                Complex u = x[i + k];
                Complex v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }

    const double scale = 1.0 / std::sqrt(double(n));
    for (auto& v : x) v *= scale;
}

std::vector<Complex> fft(const std::vector<Complex>& x, bool inverse) {
    std::vector<Complex> y = x;
    fft_inplace(y, inverse);
    return y;
}

}  // namespace cavlink
