#pragma once

#include "kslab/matrix.hpp"

#include <vector>

namespace kslab {

/// 1-based column indices, repetitions allowed. Factor-level supports of a
/// Kronecker dictionary are genuine multisets even when the merged support
/// has distinct entries.
using IndexMultiset = std::vector<int>;

/// Kronecker product: block (i,j) of the result equals a(i,j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Column-wise Kronecker product; inputs must have equal column counts.
Matrix khatri_rao(const Matrix& a, const Matrix& b);

/// Entrywise product; dimensions must match.
Matrix hadamard(const Matrix& a, const Matrix& b);

/// Sum of all entries.
double sum_entries(const Matrix& a);

/// Column-stacking vectorization. This convention makes
/// vec(B * X * A^T) == kron(A, B) * vec(X) hold exactly with kron as
/// defined above; it is pinned by tests, not assumed.
Matrix vec(const Matrix& x);

/// Inverse of vec for the given shape.
Matrix unvec(const Matrix& v, int rows, int cols);

/// Merges factor-level 1-based indices into product-level indices:
/// merged = (ia - 1) * p2 + ib. Entries of ia must lie in [1, p1] when p1
/// is known to the caller; entries of ib must lie in [1, p2].
IndexMultiset merge_indices(const IndexMultiset& ia, const IndexMultiset& ib, int p2);

/// Exact inverse of merge_indices: returns the (ia, ib) pair.
std::pair<IndexMultiset, IndexMultiset> split_indices(const IndexMultiset& merged, int p2);

/// Columns of a selected by 1-based indices, repetitions allowed.
Matrix select_columns(const Matrix& a, const IndexMultiset& indices);

/// Frobenius distance ||a - b||_F.
double fro_distance(const Matrix& a, const Matrix& b);

/// Each column scaled to unit l2 norm. A zero column is an error.
Matrix normalize_columns(const Matrix& a);

}  // namespace kslab
