#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hfc::detail {

// Row-major GEMM kernels. Every C element is accumulated by exactly one
// thread in a fixed order, so results are bit-identical for any thread count.
inline constexpr int64_t kGemmParallelCutoff = 1 << 15;

// C(M,N) += A(M,K) * B(K,N)
template <typename T>
void gemm_nn(int M, int N, int K, const T* A, const T* B, T* C) {
    const int64_t work = static_cast<int64_t>(M) * N * K;
#pragma omp parallel for schedule(static) if (work > kGemmParallelCutoff)
    for (int i = 0; i < M; ++i) {
        T* crow = C + static_cast<int64_t>(i) * N;
        const T* arow = A + static_cast<int64_t>(i) * K;
        for (int k = 0; k < K; ++k) {
            const T a = arow[k];
            const T* brow = B + static_cast<int64_t>(k) * N;
            for (int j = 0; j < N; ++j) crow[j] += a * brow[j];
        }
    }
}

// C(M,N) += A(M,K) * B(N,K)^T
template <typename T>
void gemm_nt(int M, int N, int K, const T* A, const T* B, T* C) {
    const int64_t work = static_cast<int64_t>(M) * N * K;
#pragma omp parallel for schedule(static) if (work > kGemmParallelCutoff)
    for (int i = 0; i < M; ++i) {
        const T* arow = A + static_cast<int64_t>(i) * K;
        T* crow = C + static_cast<int64_t>(i) * N;
        for (int j = 0; j < N; ++j) {
            const T* brow = B + static_cast<int64_t>(j) * K;
            T acc = T(0);
            for (int k = 0; k < K; ++k) acc += arow[k] * brow[k];
            crow[j] += acc;
        }
    }
}

// C(M,N) += A(K,M)^T * B(K,N)
template <typename T>
void gemm_tn(int M, int N, int K, const T* A, const T* B, T* C) {
    const int64_t work = static_cast<int64_t>(M) * N * K;
#pragma omp parallel for schedule(static) if (work > kGemmParallelCutoff)
    for (int i = 0; i < M; ++i) {
        T* crow = C + static_cast<int64_t>(i) * N;
        for (int k = 0; k < K; ++k) {
            const T a = A[static_cast<int64_t>(k) * M + i];
            const T* brow = B + static_cast<int64_t>(k) * N;
            for (int j = 0; j < N; ++j) crow[j] += a * brow[j];
        }
    }
}

} // namespace hfc::detail
