#pragma once

// Test-only reference implementations. These deliberately use the most
// direct formulas (nested loops, no im2col, no log-sum-exp tricks) and stay
// independent of the library's execution paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hfc/tensor.hpp"

namespace oracle {

// Direct 7-loop convolution, NCHW x OIKK.
inline hfc::Tensor<double> conv2d(const hfc::Tensor<double>& x, const hfc::Tensor<double>& w,
                                  const std::vector<double>& bias, int stride, int padding) {
    const int N = x.dim(0), I = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int O = w.dim(0), K = w.dim(2);
    const int OH = (H + 2 * padding - K) / stride + 1;
    const int OW = (W + 2 * padding - K) / stride + 1;
    hfc::Tensor<double> y({N, O, OH, OW});
    for (int n = 0; n < N; ++n)
        for (int o = 0; o < O; ++o)
            for (int oh = 0; oh < OH; ++oh)
                for (int ow = 0; ow < OW; ++ow) {
                    double acc = bias[o];
                    for (int c = 0; c < I; ++c)
                        for (int ki = 0; ki < K; ++ki)
                            for (int kj = 0; kj < K; ++kj) {
                                const int ih = oh * stride - padding + ki;
                                const int iw = ow * stride - padding + kj;
                                if (ih < 0 || ih >= H || iw < 0 || iw >= W) continue;
                                acc += x.data()[((static_cast<int64_t>(n) * I + c) * H + ih) * W + iw] *
                                       w.data()[((static_cast<int64_t>(o) * I + c) * K + ki) * K + kj];
                            }
                    y.data()[((static_cast<int64_t>(n) * O + o) * OH + oh) * OW + ow] = acc;
                }
    return y;
}

// Direct-formula batch normalization, train mode (biased variance).
inline hfc::Tensor<double> batchnorm_train(const hfc::Tensor<double>& x,
                                           const std::vector<double>& gamma,
                                           const std::vector<double>& beta, double eps) {
    const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int64_t m = static_cast<int64_t>(N) * H * W;
    hfc::Tensor<double> y({N, C, H, W});
    for (int c = 0; c < C; ++c) {
        double mean = 0.0;
        for (int n = 0; n < N; ++n)
            for (int h = 0; h < H; ++h)
                for (int wcol = 0; wcol < W; ++wcol)
                    mean += x.data()[((static_cast<int64_t>(n) * C + c) * H + h) * W + wcol];
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (int n = 0; n < N; ++n)
            for (int h = 0; h < H; ++h)
                for (int wcol = 0; wcol < W; ++wcol) {
                    const double d = x.data()[((static_cast<int64_t>(n) * C + c) * H + h) * W + wcol] - mean;
                    var += d * d;
                }
        var /= static_cast<double>(m);
        for (int n = 0; n < N; ++n)
            for (int h = 0; h < H; ++h)
                for (int wcol = 0; wcol < W; ++wcol) {
                    const int64_t at = ((static_cast<int64_t>(n) * C + c) * H + h) * W + wcol;
                    y.data()[at] = gamma[c] * (x.data()[at] - mean) / std::sqrt(var + eps) + beta[c];
                }
    }
    return y;
}

inline hfc::Tensor<double> matmul(const hfc::Tensor<double>& a, const hfc::Tensor<double>& b) {
    const int B = a.dim(0), F = a.dim(1), U = b.dim(1);
    hfc::Tensor<double> y({B, U});
    for (int i = 0; i < B; ++i)
        for (int j = 0; j < U; ++j) {
            double acc = 0.0;
            for (int k = 0; k < F; ++k)
                acc += a.data()[static_cast<int64_t>(i) * F + k] * b.data()[static_cast<int64_t>(k) * U + j];
            y.data()[static_cast<int64_t>(i) * U + j] = acc;
        }
    return y;
}

template <typename T>
hfc::Tensor<T> max_pool(const hfc::Tensor<T>& x, int window) {
    const int N = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
    const int OH = H / window, OW = W / window;
    hfc::Tensor<T> y({N, C, OH, OW});
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c)
            for (int oh = 0; oh < OH; ++oh)
                for (int ow = 0; ow < OW; ++ow) {
                    T best = -std::numeric_limits<T>::infinity();
                    for (int di = 0; di < window; ++di)
                        for (int dj = 0; dj < window; ++dj)
                            best = std::max(best,
                                            x.data()[((static_cast<int64_t>(n) * C + c) * H + oh * window + di) * W +
                                                     ow * window + dj]);
                    y.data()[((static_cast<int64_t>(n) * C + c) * OH + oh) * OW + ow] = best;
                }
    return y;
}

// Step-by-step Adam reference for a single scalar parameter.
struct ScalarAdam {
    double m = 0.0, v = 0.0;
    int64_t t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8, lr = 1e-3;

    double step(double param, double grad) {
        t += 1;
        m = beta1 * m + (1.0 - beta1) * grad;
        v = beta2 * v + (1.0 - beta2) * grad * grad;
        const double mhat = m / (1.0 - std::pow(beta1, static_cast<double>(t)));
        const double vhat = v / (1.0 - std::pow(beta2, static_cast<double>(t)));
        return param - lr * mhat / (std::sqrt(vhat) + eps);
    }
};

// Exhaustive 2-coloring search for the optimal 2-means SSE of tiny point
// sets. Considers every partition with two non-empty groups.
inline double best_two_partition_sse(const std::vector<std::vector<double>>& pts) {
    const size_t n = pts.size();
    const size_t d = pts[0].size();
    double best = std::numeric_limits<double>::infinity();
    for (uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        std::vector<double> c0(d, 0.0), c1(d, 0.0);
        int n0 = 0, n1 = 0;
        for (size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                ++n0;
                for (size_t j = 0; j < d; ++j) c0[j] += pts[i][j];
            } else {
                ++n1;
                for (size_t j = 0; j < d; ++j) c1[j] += pts[i][j];
            }
        }
        for (size_t j = 0; j < d; ++j) {
            c0[j] /= n0;
            c1[j] /= n1;
        }
        double sse = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const auto& c = (mask & (1u << i)) ? c0 : c1;
            for (size_t j = 0; j < d; ++j) {
                const double diff = pts[i][j] - c[j];
                sse += diff * diff;
            }
        }
        best = std::min(best, sse);
    }
    return best;
}

} // namespace oracle
