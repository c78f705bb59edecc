#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hfc/errors.hpp"
#include "hfc/gemm.hpp"
#include "hfc/tensor.hpp"

namespace hfc::ops {

enum class PoolKind { kMax, kGlobalAverage };

namespace detail {

template <typename T>
inline T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw DimensionError(msg);
}

} // namespace detail

// ---------------------------------------------------------------------------
// conv2d: NCHW input, OIKK weight (square kernel), per-output-channel bias.
// Output H' = floor((H + 2*pad - K)/stride) + 1, likewise W'.
// Implemented as im2col + GEMM; the column buffer is kept alive by the
// backward closure when a tape is recording.
// ---------------------------------------------------------------------------
template <typename T>
TensorPtr<T> conv2d(const TensorPtr<T>& input, const TensorPtr<T>& weight,
                    const TensorPtr<T>& bias, int stride, int padding,
                    Tape<T>* tape) {
    detail::require(input->rank() == 4, "conv2d input must be NCHW, got rank " + std::to_string(input->rank()));
    detail::require(weight->rank() == 4, "conv2d weight must be OIKK, got rank " + std::to_string(weight->rank()));
    const int N = input->dim(0), I = input->dim(1), H = input->dim(2), W = input->dim(3);
    const int O = weight->dim(0), WI = weight->dim(1), K = weight->dim(2), K2 = weight->dim(3);
    detail::require(K == K2, "conv2d kernel must be square, got " + std::to_string(K) + "x" + std::to_string(K2));
    if (I != WI) {
        throw DimensionError("conv2d channel mismatch: input axis 1 has " + std::to_string(I) +
                             " channels, weight axis 1 expects " + std::to_string(WI));
    }
    detail::require(bias->rank() == 1 && bias->dim(0) == O,
                    "conv2d bias must have " + std::to_string(O) + " entries");
    if (stride < 1) throw ParameterError("conv2d stride must be >= 1");
    if (padding < 0) throw ParameterError("conv2d padding must be >= 0");
    if (H + 2 * padding < K || W + 2 * padding < K) {
        throw DimensionError("conv2d: padded spatial extent (" + std::to_string(H + 2 * padding) + "," +
                             std::to_string(W + 2 * padding) + ") admits no placement of kernel " +
                             std::to_string(K));
    }

    const int OH = (H + 2 * padding - K) / stride + 1;
    const int OW = (W + 2 * padding - K) / stride + 1;
    const int P = OH * OW;
    const int R = I * K * K;
    const int64_t NP = static_cast<int64_t>(N) * P;

    auto col = std::make_shared<std::vector<T>>(static_cast<size_t>(R) * NP, T(0));
    {
        const T* x = input->data();
#pragma omp parallel for schedule(static) if (NP * R > hfc::detail::kGemmParallelCutoff)
        for (int n = 0; n < N; ++n) {
            for (int c = 0; c < I; ++c) {
                const T* plane = x + (static_cast<int64_t>(n) * I + c) * H * W;
                for (int ki = 0; ki < K; ++ki) {
                    for (int kj = 0; kj < K; ++kj) {
                        const int r = (c * K + ki) * K + kj;
                        T* crow = col->data() + static_cast<int64_t>(r) * NP + static_cast<int64_t>(n) * P;
                        for (int oh = 0; oh < OH; ++oh) {
                            const int ih = oh * stride - padding + ki;
                            if (ih < 0 || ih >= H) continue;
                            const T* src = plane + static_cast<int64_t>(ih) * W;
                            T* dst = crow + static_cast<int64_t>(oh) * OW;
                            for (int ow = 0; ow < OW; ++ow) {
                                const int iw = ow * stride - padding + kj;
                                if (iw >= 0 && iw < W) dst[ow] = src[iw];
                            }
                        }
                    }
                }
            }
        }
    }

    std::vector<T> out_mat(static_cast<size_t>(O) * NP, T(0));
    hfc::detail::gemm_nn(O, static_cast<int>(NP), R, weight->data(), col->data(), out_mat.data());

    auto out = make_tensor<T>({N, O, OH, OW});
    {
        T* y = out->data();
        const T* b = bias->data();
        for (int n = 0; n < N; ++n)
            for (int o = 0; o < O; ++o) {
                const T* src = out_mat.data() + static_cast<int64_t>(o) * NP + static_cast<int64_t>(n) * P;
                T* dst = y + (static_cast<int64_t>(n) * O + o) * P;
                const T bo = b[o];
                for (int q = 0; q < P; ++q) dst[q] = src[q] + bo;
            }
    }

    if (tape) {
        tape->record([=]() {
            if (!out->has_grad()) return;
            const T* gy = out->grad().data();
            // Gather upstream grad into (O x NP) layout.
            std::vector<T> gout(static_cast<size_t>(O) * NP, T(0));
            for (int n = 0; n < N; ++n)
                for (int o = 0; o < O; ++o) {
                    const T* src = gy + (static_cast<int64_t>(n) * O + o) * P;
                    T* dst = gout.data() + static_cast<int64_t>(o) * NP + static_cast<int64_t>(n) * P;
                    for (int q = 0; q < P; ++q) dst[q] = src[q];
                }
            if (bias->track_grad()) {
                T* gb = bias->grad().data();
                for (int o = 0; o < O; ++o) {
                    const T* row = gout.data() + static_cast<int64_t>(o) * NP;
                    T acc = T(0);
                    for (int64_t q = 0; q < NP; ++q) acc += row[q];
                    gb[o] += acc;
                }
            }
            if (weight->track_grad()) {
                hfc::detail::gemm_nt(O, R, static_cast<int>(NP), gout.data(), col->data(),
                                     weight->grad().data());
            }
            if (input->track_grad()) {
                std::vector<T> gcol(static_cast<size_t>(R) * NP, T(0));
                hfc::detail::gemm_tn(R, static_cast<int>(NP), O, weight->data(), gout.data(), gcol.data());
                T* gx = input->grad().data();
#pragma omp parallel for schedule(static) if (NP * R > hfc::detail::kGemmParallelCutoff)
                for (int n = 0; n < N; ++n) {
                    for (int c = 0; c < I; ++c) {
                        T* plane = gx + (static_cast<int64_t>(n) * I + c) * H * W;
                        for (int ki = 0; ki < K; ++ki)
                            for (int kj = 0; kj < K; ++kj) {
                                const int r = (c * K + ki) * K + kj;
                                const T* crow = gcol.data() + static_cast<int64_t>(r) * NP +
                                                static_cast<int64_t>(n) * P;
                                for (int oh = 0; oh < OH; ++oh) {
                                    const int ih = oh * stride - padding + ki;
                                    if (ih < 0 || ih >= H) continue;
                                    T* dst = plane + static_cast<int64_t>(ih) * W;
                                    const T* src = crow + static_cast<int64_t>(oh) * OW;
                                    for (int ow = 0; ow < OW; ++ow) {
                                        const int iw = ow * stride - padding + kj;
                                        if (iw >= 0 && iw < W) dst[iw] += src[ow];
                                    }
                                }
                            }
                    }
                }
            }
        });
    }
    return out;
}

// ---------------------------------------------------------------------------
// batchnorm2d: per-channel normalization over (N,H,W). Train mode uses batch
// statistics (biased variance) and updates the running stats in place via
// EMA; eval mode is a pure function of input and running stats.
// ---------------------------------------------------------------------------
template <typename T>
TensorPtr<T> batchnorm2d(const TensorPtr<T>& input, const TensorPtr<T>& gamma,
                         const TensorPtr<T>& beta, std::vector<T>& running_mean,
                         std::vector<T>& running_var, bool training, T momentum,
                         T epsilon, Tape<T>* tape) {
    detail::require(input->rank() == 4, "batchnorm2d input must be NCHW");
    const int N = input->dim(0), C = input->dim(1), H = input->dim(2), W = input->dim(3);
    if (epsilon <= T(0)) throw ParameterError("batchnorm2d epsilon must be > 0");
    if (gamma->size() != C || beta->size() != C)
        throw DimensionError("batchnorm2d gamma/beta must have " + std::to_string(C) + " entries");
    if (static_cast<int>(running_mean.size()) != C || static_cast<int>(running_var.size()) != C)
        throw DimensionError("batchnorm2d running stats must have " + std::to_string(C) + " entries");
    const int64_t m = static_cast<int64_t>(N) * H * W;
    if (training && m < 2)
        throw ValidationError("batchnorm2d train mode needs >= 2 elements per channel, got " + std::to_string(m));

    auto out = make_tensor<T>({N, C, H, W});
    const int64_t plane = static_cast<int64_t>(H) * W;
    const T* x = input->data();
    T* y = out->data();

    if (!training) {
        std::vector<T> invstd(C);
        for (int c = 0; c < C; ++c) invstd[c] = T(1) / std::sqrt(running_var[c] + epsilon);
        std::vector<T> rm = running_mean;  // snapshot so later updates cannot leak in
        for (int n = 0; n < N; ++n)
            for (int c = 0; c < C; ++c) {
                const T* src = x + (static_cast<int64_t>(n) * C + c) * plane;
                T* dst = y + (static_cast<int64_t>(n) * C + c) * plane;
                const T g = gamma->data()[c] * invstd[c];
                const T b = beta->data()[c] - rm[c] * g;
                for (int64_t q = 0; q < plane; ++q) dst[q] = g * src[q] + b;
            }
        if (tape) {
            auto istd = std::make_shared<std::vector<T>>(std::move(invstd));
            auto mean = std::make_shared<std::vector<T>>(std::move(rm));
            tape->record([=]() {
                if (!out->has_grad()) return;
                const T* gy = out->grad().data();
                const T* xv = input->data();
                for (int c = 0; c < C; ++c) {
                    T s1 = T(0), s2 = T(0);
                    for (int n = 0; n < N; ++n) {
                        const T* g = gy + (static_cast<int64_t>(n) * C + c) * plane;
                        const T* xr = xv + (static_cast<int64_t>(n) * C + c) * plane;
                        for (int64_t q = 0; q < plane; ++q) {
                            s1 += g[q];
                            s2 += g[q] * ((xr[q] - (*mean)[c]) * (*istd)[c]);
                        }
                    }
                    if (beta->track_grad()) beta->grad()[c] += s1;
                    if (gamma->track_grad()) gamma->grad()[c] += s2;
                    if (input->track_grad()) {
                        const T k = gamma->data()[c] * (*istd)[c];
                        T* gx = input->grad().data();
                        for (int n = 0; n < N; ++n) {
                            const T* g = gy + (static_cast<int64_t>(n) * C + c) * plane;
                            T* dst = gx + (static_cast<int64_t>(n) * C + c) * plane;
                            for (int64_t q = 0; q < plane; ++q) dst[q] += k * g[q];
                        }
                    }
                }
            });
        }
        return out;
    }

    // Train mode.
    std::vector<T> mean(C, T(0)), var(C, T(0));
#pragma omp parallel for schedule(static) if (static_cast<int64_t>(C) * N * plane > hfc::detail::kGemmParallelCutoff)
    for (int c = 0; c < C; ++c) {
        T acc = T(0);
        for (int n = 0; n < N; ++n) {
            const T* src = x + (static_cast<int64_t>(n) * C + c) * plane;
            for (int64_t q = 0; q < plane; ++q) acc += src[q];
        }
        const T mu = acc / static_cast<T>(m);
        T vacc = T(0);
        for (int n = 0; n < N; ++n) {
            const T* src = x + (static_cast<int64_t>(n) * C + c) * plane;
            for (int64_t q = 0; q < plane; ++q) {
                const T d = src[q] - mu;
                vacc += d * d;
            }
        }
        mean[c] = mu;
        var[c] = vacc / static_cast<T>(m);
    }

    auto xhat = std::make_shared<std::vector<T>>(static_cast<size_t>(input->size()));
    auto invstd = std::make_shared<std::vector<T>>(C);
    for (int c = 0; c < C; ++c) (*invstd)[c] = T(1) / std::sqrt(var[c] + epsilon);
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            const T* src = x + (static_cast<int64_t>(n) * C + c) * plane;
            T* xh = xhat->data() + (static_cast<int64_t>(n) * C + c) * plane;
            T* dst = y + (static_cast<int64_t>(n) * C + c) * plane;
            const T mu = mean[c], is = (*invstd)[c];
            const T g = gamma->data()[c], b = beta->data()[c];
            for (int64_t q = 0; q < plane; ++q) {
                const T v = (src[q] - mu) * is;
                xh[q] = v;
                dst[q] = g * v + b;
            }
        }

    for (int c = 0; c < C; ++c) {
        running_mean[c] = (T(1) - momentum) * running_mean[c] + momentum * mean[c];
        running_var[c] = (T(1) - momentum) * running_var[c] + momentum * var[c];
    }

    if (tape) {
        tape->record([=]() {
            if (!out->has_grad()) return;
            const T* gy = out->grad().data();
            for (int c = 0; c < C; ++c) {
                T s1 = T(0), s2 = T(0);
                for (int n = 0; n < N; ++n) {
                    const T* g = gy + (static_cast<int64_t>(n) * C + c) * plane;
                    const T* xh = xhat->data() + (static_cast<int64_t>(n) * C + c) * plane;
                    for (int64_t q = 0; q < plane; ++q) {
                        s1 += g[q];
                        s2 += g[q] * xh[q];
                    }
                }
                if (beta->track_grad()) beta->grad()[c] += s1;
                if (gamma->track_grad()) gamma->grad()[c] += s2;
                if (input->track_grad()) {
                    const T k = gamma->data()[c] * (*invstd)[c];
                    const T mean_g = s1 / static_cast<T>(m);
                    const T mean_gx = s2 / static_cast<T>(m);
                    T* gx = input->grad().data();
                    for (int n = 0; n < N; ++n) {
                        const T* g = gy + (static_cast<int64_t>(n) * C + c) * plane;
                        const T* xh = xhat->data() + (static_cast<int64_t>(n) * C + c) * plane;
                        T* dst = gx + (static_cast<int64_t>(n) * C + c) * plane;
                        for (int64_t q = 0; q < plane; ++q)
                            dst[q] += k * (g[q] - mean_g - xh[q] * mean_gx);
                    }
                }
            }
        });
    }
    return out;
}

// Elementwise x * sigmoid(x).
template <typename T>
TensorPtr<T> silu(const TensorPtr<T>& input, Tape<T>* tape) {
    auto out = make_tensor<T>(input->shape());
    const T* x = input->data();
    T* y = out->data();
    const int64_t n = input->size();
#pragma omp parallel for schedule(static) if (n > hfc::detail::kGemmParallelCutoff)
    for (int64_t i = 0; i < n; ++i) y[i] = x[i] * detail::sigmoid(x[i]);
    if (tape) {
        tape->record([=]() {
            if (!out->has_grad() || !input->track_grad()) return;
            const T* gy = out->grad().data();
            T* gx = input->grad().data();
            const T* xv = input->data();
            for (int64_t i = 0; i < n; ++i) {
                const T s = detail::sigmoid(xv[i]);
                gx[i] += gy[i] * s * (T(1) + xv[i] * (T(1) - s));
            }
        });
    }
    return out;
}

// Non-overlapping max pooling; spatial extents must divide the window.
template <typename T>
TensorPtr<T> max_pool2d(const TensorPtr<T>& input, int window, Tape<T>* tape) {
    detail::require(input->rank() == 4, "max_pool2d input must be NCHW");
    if (window < 1) throw ParameterError("max_pool2d window must be >= 1");
    const int N = input->dim(0), C = input->dim(1), H = input->dim(2), W = input->dim(3);
    if (H % window != 0 || W % window != 0) {
        throw DimensionError("max_pool2d: extents (" + std::to_string(H) + "," + std::to_string(W) +
                             ") not divisible by window " + std::to_string(window));
    }
    const int OH = H / window, OW = W / window;
    auto out = make_tensor<T>({N, C, OH, OW});
    auto argmax = std::make_shared<std::vector<int64_t>>(static_cast<size_t>(out->size()));
    const T* x = input->data();
    T* y = out->data();
    int64_t oidx = 0;
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            const int64_t base = (static_cast<int64_t>(n) * C + c) * H * W;
            for (int oh = 0; oh < OH; ++oh)
                for (int ow = 0; ow < OW; ++ow, ++oidx) {
                    T best = x[base + static_cast<int64_t>(oh * window) * W + ow * window];
                    int64_t best_at = base + static_cast<int64_t>(oh * window) * W + ow * window;
                    for (int di = 0; di < window; ++di)
                        for (int dj = 0; dj < window; ++dj) {
                            const int64_t at = base + static_cast<int64_t>(oh * window + di) * W +
                                               (ow * window + dj);
                            if (x[at] > best) {
                                best = x[at];
                                best_at = at;
                            }
                        }
                    y[oidx] = best;
                    (*argmax)[oidx] = best_at;
                }
        }
    if (tape) {
        tape->record([=]() {
            if (!out->has_grad() || !input->track_grad()) return;
            const T* gy = out->grad().data();
            T* gx = input->grad().data();
            for (int64_t i = 0; i < out->size(); ++i) gx[(*argmax)[i]] += gy[i];
        });
    }
    return out;
}

// Reduces each channel map to its mean: NCHW -> NC.
template <typename T>
TensorPtr<T> global_avg_pool2d(const TensorPtr<T>& input, Tape<T>* tape) {
    detail::require(input->rank() == 4, "global_avg_pool2d input must be NCHW");
    const int N = input->dim(0), C = input->dim(1), H = input->dim(2), W = input->dim(3);
    const int64_t plane = static_cast<int64_t>(H) * W;
    auto out = make_tensor<T>({N, C});
    const T* x = input->data();
    T* y = out->data();
    for (int n = 0; n < N; ++n)
        for (int c = 0; c < C; ++c) {
            const T* src = x + (static_cast<int64_t>(n) * C + c) * plane;
            T acc = T(0);
            for (int64_t q = 0; q < plane; ++q) acc += src[q];
            y[static_cast<int64_t>(n) * C + c] = acc / static_cast<T>(plane);
        }
    if (tape) {
        tape->record([=]() {
            if (!out->has_grad() || !input->track_grad()) return;
            const T* gy = out->grad().data();
            T* gx = input->grad().data();
            for (int n = 0; n < N; ++n)
                for (int c = 0; c < C; ++c) {
                    const T g = gy[static_cast<int64_t>(n) * C + c] / static_cast<T>(plane);
                    T* dst = gx + (static_cast<int64_t>(n) * C + c) * plane;
                    for (int64_t q = 0; q < plane; ++q) dst[q] += g;
                }
        });
    }
    return out;
}

// Dispatcher mirroring the two pooling kinds; window is ignored for
// global average pooling.
template <typename T>
TensorPtr<T> pool2d(const TensorPtr<T>& input, PoolKind kind, int window, Tape<T>* tape) {
    return kind == PoolKind::kMax ? max_pool2d(input, window, tape)
                                  : global_avg_pool2d(input, tape);
}

// Affine map: (B,F) x (F,U) + (U) -> (B,U).
template <typename T>
TensorPtr<T> linear(const TensorPtr<T>& input, const TensorPtr<T>& weight,
                    const TensorPtr<T>& bias, Tape<T>* tape) {
    detail::require(input->rank() == 2, "linear input must be BxF");
    detail::require(weight->rank() == 2, "linear weight must be FxU");
    const int B = input->dim(0), F = input->dim(1);
    const int WF = weight->dim(0), U = weight->dim(1);
    if (F != WF)
        throw DimensionError("linear inner dimensions disagree: input F=" + std::to_string(F) +
                             ", weight F=" + std::to_string(WF));
    detail::require(bias->rank() == 1 && bias->dim(0) == U,
                    "linear bias must have " + std::to_string(U) + " entries");
    auto out = make_tensor<T>({B, U});
    {
        T* y = out->data();
        const T* b = bias->data();
        for (int i = 0; i < B; ++i)
            for (int j = 0; j < U; ++j) y[static_cast<int64_t>(i) * U + j] = b[j];
        hfc::detail::gemm_nn(B, U, F, input->data(), weight->data(), y);
    }
    if (tape) {
        tape->record([=]() {
            if (!out->has_grad()) return;
            const T* gy = out->grad().data();
            if (bias->track_grad()) {
                T* gb = bias->grad().data();
                for (int i = 0; i < B; ++i)
                    for (int j = 0; j < U; ++j) gb[j] += gy[static_cast<int64_t>(i) * U + j];
            }
            if (weight->track_grad())
                hfc::detail::gemm_tn(F, U, B, input->data(), gy, weight->grad().data());
            if (input->track_grad())
                hfc::detail::gemm_nt(B, F, U, gy, weight->data(), input->grad().data());
        });
    }
    return out;
}

// Row-wise softmax probabilities (inference helper, not taped).
template <typename T>
std::vector<T> softmax_rows(const Tensor<T>& logits) {
    const int B = logits.dim(0), C = logits.dim(1);
    std::vector<T> p(static_cast<size_t>(B) * C);
    for (int i = 0; i < B; ++i) {
        const T* row = logits.data() + static_cast<int64_t>(i) * C;
        T m = row[0];
        for (int j = 1; j < C; ++j) m = std::max(m, row[j]);
        T sum = T(0);
        for (int j = 0; j < C; ++j) {
            p[static_cast<int64_t>(i) * C + j] = std::exp(row[j] - m);
            sum += p[static_cast<int64_t>(i) * C + j];
        }
        for (int j = 0; j < C; ++j) p[static_cast<int64_t>(i) * C + j] /= sum;
    }
    return p;
}

// Mean softmax cross-entropy over the batch against one-hot targets,
// computed in the log-sum-exp form. Gradient on logits is (p - y)/B.
template <typename T>
TensorPtr<T> softmax_cross_entropy(const TensorPtr<T>& logits, const Tensor<T>& targets,
                                   Tape<T>* tape) {
    detail::require(logits->rank() == 2, "softmax_cross_entropy logits must be BxC");
    const int B = logits->dim(0), C = logits->dim(1);
    if (C < 2) throw ValidationError("softmax_cross_entropy needs >= 2 classes");
    if (targets.shape() != logits->shape())
        throw DimensionError("softmax_cross_entropy target shape " +
                             Tensor<T>::shape_string(targets.shape()) + " != logits shape " +
                             Tensor<T>::shape_string(logits->shape()));

    std::vector<int> true_class(B, -1);
    for (int i = 0; i < B; ++i) {
        int ones = 0;
        for (int j = 0; j < C; ++j) {
            const T v = targets.data()[static_cast<int64_t>(i) * C + j];
            if (v == T(1)) {
                ++ones;
                true_class[i] = j;
            } else if (v != T(0)) {
                throw ValidationError("target row " + std::to_string(i) + " is not one-hot");
            }
        }
        if (ones != 1) throw ValidationError("target row " + std::to_string(i) + " is not one-hot");
    }

    auto probs = std::make_shared<std::vector<T>>(static_cast<size_t>(B) * C);
    T total = T(0);
    for (int i = 0; i < B; ++i) {
        const T* row = logits->data() + static_cast<int64_t>(i) * C;
        int amax = 0;
        for (int j = 1; j < C; ++j)
            if (row[j] > row[amax]) amax = j;
        const T m = row[amax];
        T rest = T(0);
        for (int j = 0; j < C; ++j)
            if (j != amax) rest += std::exp(row[j] - m);
        const T lse = m + std::log1p(rest);
        total += lse - row[true_class[i]];
        for (int j = 0; j < C; ++j)
            (*probs)[static_cast<int64_t>(i) * C + j] = std::exp(row[j] - lse);
    }
    auto out = make_tensor<T>({1}, {total / static_cast<T>(B)});

    if (tape) {
        auto tc = std::make_shared<std::vector<int>>(std::move(true_class));
        tape->record([=]() {
            if (!out->has_grad() || !logits->track_grad()) return;
            const T g = out->grad()[0];
            T* gx = logits->grad().data();
            for (int i = 0; i < B; ++i)
                for (int j = 0; j < C; ++j) {
                    const T y = (j == (*tc)[i]) ? T(1) : T(0);
                    gx[static_cast<int64_t>(i) * C + j] +=
                        g * ((*probs)[static_cast<int64_t>(i) * C + j] - y) / static_cast<T>(B);
                }
        });
    }
    return out;
}

// Elementwise sum of two same-shape tensors.
template <typename T>
TensorPtr<T> add(const TensorPtr<T>& a, const TensorPtr<T>& b, Tape<T>* tape) {
    if (a->shape() != b->shape())
        throw DimensionError("add shape mismatch: " + Tensor<T>::shape_string(a->shape()) + " vs " +
                             Tensor<T>::shape_string(b->shape()));
    auto out = make_tensor<T>(a->shape());
    const int64_t n = a->size();
    for (int64_t i = 0; i < n; ++i) out->data()[i] = a->data()[i] + b->data()[i];
    if (tape) {
        tape->record([=]() {
            if (!out->has_grad()) return;
            const T* gy = out->grad().data();
            if (a->track_grad()) {
                T* ga = a->grad().data();
                for (int64_t i = 0; i < n; ++i) ga[i] += gy[i];
            }
            if (b->track_grad()) {
                T* gb = b->grad().data();
                for (int64_t i = 0; i < n; ++i) gb[i] += gy[i];
            }
        });
    }
    return out;
}

// Channel-axis concatenation of NCHW tensors with equal N, H, W.
template <typename T>
TensorPtr<T> concat_channels(const std::vector<TensorPtr<T>>& parts, Tape<T>* tape) {
    if (parts.empty()) throw DimensionError("concat_channels needs at least one input");
    const int N = parts[0]->dim(0), H = parts[0]->dim(2), W = parts[0]->dim(3);
    int C = 0;
    for (const auto& p : parts) {
        detail::require(p->rank() == 4, "concat_channels inputs must be NCHW");
        if (p->dim(0) != N || p->dim(2) != H || p->dim(3) != W)
            throw DimensionError("concat_channels inputs disagree on N/H/W");
        C += p->dim(1);
    }
    auto out = make_tensor<T>({N, C, H, W});
    const int64_t plane = static_cast<int64_t>(H) * W;
    for (int n = 0; n < N; ++n) {
        int64_t coff = 0;
        for (const auto& p : parts) {
            const int pc = p->dim(1);
            const T* src = p->data() + static_cast<int64_t>(n) * pc * plane;
            T* dst = out->data() + (static_cast<int64_t>(n) * C + coff) * plane;
            std::copy(src, src + static_cast<int64_t>(pc) * plane, dst);
            coff += pc;
        }
    }
    if (tape) {
        tape->record([=]() {
            if (!out->has_grad()) return;
            const T* gy = out->grad().data();
            for (int n = 0; n < N; ++n) {
                int64_t coff = 0;
                for (const auto& p : parts) {
                    const int pc = p->dim(1);
                    if (p->track_grad()) {
                        T* dst = p->grad().data() + static_cast<int64_t>(n) * pc * plane;
                        const T* src = gy + (static_cast<int64_t>(n) * C + coff) * plane;
                        for (int64_t q = 0; q < static_cast<int64_t>(pc) * plane; ++q) dst[q] += src[q];
                    }
                    coff += pc;
                }
            }
        });
    }
    return out;
}

// Channel slice [begin, end) of an NCHW tensor.
template <typename T>
TensorPtr<T> slice_channels(const TensorPtr<T>& input, int begin, int end, Tape<T>* tape) {
    detail::require(input->rank() == 4, "slice_channels input must be NCHW");
    const int N = input->dim(0), C = input->dim(1), H = input->dim(2), W = input->dim(3);
    if (begin < 0 || end > C || begin >= end)
        throw DimensionError("slice_channels range [" + std::to_string(begin) + "," +
                             std::to_string(end) + ") invalid for " + std::to_string(C) + " channels");
    const int SC = end - begin;
    const int64_t plane = static_cast<int64_t>(H) * W;
    auto out = make_tensor<T>({N, SC, H, W});
    for (int n = 0; n < N; ++n) {
        const T* src = input->data() + (static_cast<int64_t>(n) * C + begin) * plane;
        T* dst = out->data() + static_cast<int64_t>(n) * SC * plane;
        std::copy(src, src + static_cast<int64_t>(SC) * plane, dst);
    }
    if (tape) {
        tape->record([=]() {
            if (!out->has_grad() || !input->track_grad()) return;
            const T* gy = out->grad().data();
            T* gx = input->grad().data();
            for (int n = 0; n < N; ++n) {
                T* dst = gx + (static_cast<int64_t>(n) * C + begin) * plane;
                const T* src = gy + static_cast<int64_t>(n) * SC * plane;
                for (int64_t q = 0; q < static_cast<int64_t>(SC) * plane; ++q) dst[q] += src[q];
            }
        });
    }
    return out;
}

} // namespace hfc::ops
