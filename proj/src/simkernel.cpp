#include "imgfact/simkernel.hpp"

#include <cmath>

#include "imgfact/errors.hpp"

namespace imgfact {

double cosine(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size())
        throw DimensionMismatch("cosine: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

static double row_score(const float* row, const float* q, std::size_t dim) {
    double dot = 0.0, nr = 0.0, nq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        dot += static_cast<double>(row[j]) * q[j];
        nr += static_cast<double>(row[j]) * row[j];
        nq += static_cast<double>(q[j]) * q[j];
    }
    if (nr == 0.0 || nq == 0.0)
        return 0.0;
    return dot / (std::sqrt(nr) * std::sqrt(nq));
}

void cosine_scores_serial(std::span<const float> matrix, std::size_t dim,
                          std::span<const float> query, std::span<double> out) {
    if (dim == 0 || query.size() != dim)
        throw DimensionMismatch("cosine_scores: query dim " +
                                std::to_string(query.size()) + ", matrix dim " +
                                std::to_string(dim));
    std::size_t n = matrix.size() / dim;
    if (out.size() != n)
        throw DimensionMismatch("cosine_scores: bad output size");
    for (std::size_t i = 0; i < n; ++i)
        out[i] = row_score(matrix.data() + i * dim, query.data(), dim);
}

void cosine_scores_parallel(std::span<const float> matrix, std::size_t dim,
                            std::span<const float> query,
                            std::span<double> out) {
    if (dim == 0 || query.size() != dim)
        throw DimensionMismatch("cosine_scores: query dim " +
                                std::to_string(query.size()) + ", matrix dim " +
                                std::to_string(dim));
    std::size_t n = matrix.size() / dim;
    if (out.size() != n)
        throw DimensionMismatch("cosine_scores: bad output size");
    const float* m = matrix.data();
    const float* q = query.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        out[static_cast<std::size_t>(i)] =
            row_score(m + static_cast<std::size_t>(i) * dim, q, dim);
}

void cosine_scores(std::span<const float> matrix, std::size_t dim,
                   std::span<const float> query, std::span<double> out) {
    std::size_t n = dim == 0 ? 0 : matrix.size() / dim;
    if (n >= kParallelRowThreshold)
        cosine_scores_parallel(matrix, dim, query, out);
    else
        cosine_scores_serial(matrix, dim, query, out);
}

} // namespace imgfact
