#pragma once

#include <cstddef>
#include <span>

namespace imgfact {

/// Cosine similarity with double accumulation over float32 inputs.
/// Defined as 0 when either vector has zero norm, so degenerate embeddings
/// never poison a ranking with NaNs. Sizes must match.
double cosine(std::span<const float> a, std::span<const float> b);

/// Scores every row of a row-major (n x dim) matrix against one query:
/// out[i] = cosine(row i, query). Serial reference implementation; kept
/// independent of the parallel path so the two can be checked against each
/// other.
void cosine_scores_serial(std::span<const float> matrix, std::size_t dim,
                          std::span<const float> query, std::span<double> out);

/// OpenMP variant. Each row's accumulation is a single-thread loop in index
/// order, so results are bit-identical to the serial path regardless of
/// thread count. Falls back to the serial loop when built without OpenMP.
void cosine_scores_parallel(std::span<const float> matrix, std::size_t dim,
                            std::span<const float> query, std::span<double> out);

/// Dispatch: parallel for stores large enough to amortize the fork, serial
/// otherwise.
void cosine_scores(std::span<const float> matrix, std::size_t dim,
                   std::span<const float> query, std::span<double> out);

/// Row count below which the dispatcher stays serial.
inline constexpr std::size_t kParallelRowThreshold = 4096;

} // namespace imgfact
