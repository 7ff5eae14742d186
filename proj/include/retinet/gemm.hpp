#pragma once

namespace retinet {

// C[M,N] = A[M,K] * B[K,N]   (+= when accumulate)
void gemm_nn(int M, int N, int K, const float* A, const float* B, float* C,
             bool accumulate = false);

// C[M,N] = A[M,K] * B[N,K]^T
void gemm_nt(int M, int N, int K, const float* A, const float* B, float* C,
             bool accumulate = false);

// C[M,N] = A[K,M]^T * B[K,N]
void gemm_tn(int M, int N, int K, const float* A, const float* B, float* C,
             bool accumulate = false);

} // namespace retinet
