#pragma once

#include <vector>

#include "qreg/rewrite.hpp"

namespace qreg::oracle {

/// Dense construction caps out here: operators are full 2^rank square
/// matrices, for cross-checking only.
inline constexpr int max_dense_rank = 12;

/// Dense operator over the full register space, row-major. Component
/// index equals the basis index (qubit j contributes bit weight 2^j, so
/// qubit 0 is the fastest-varying Kronecker factor).
struct DenseOperator {
  int rank = 0;
  std::vector<c64> entries;

  std::size_t dim() const { return std::size_t{1} << rank; }
  c64& at(std::size_t row, std::size_t col) { return entries[row * dim() + col]; }
  const c64& at(std::size_t row, std::size_t col) const { return entries[row * dim() + col]; }
};

DenseOperator identity(RegisterShape shape);
DenseOperator multiply(const DenseOperator& x, const DenseOperator& y);
std::vector<c64> apply_operator(const DenseOperator& op, const std::vector<c64>& vec);

/// Kronecker product of single-qubit factors: the creation matrix at each
/// listed qubit, the identity elsewhere.
DenseOperator dense_monomial(const CreationMonomial& monomial, RegisterShape shape);

/// The stage as an explicit matrix, built column by column with a naive
/// substitution routine kept independent of the sparse rewrite engine.
DenseOperator dense_stage(const Stage& stage, RegisterShape shape);

/// Full 2^rank amplitude vector of a sparse state.
std::vector<c64> densify(const SparseState& state);

/// Max entrywise |difference| between a sparse state and a dense vector.
double compare_states(const SparseState& state, const std::vector<c64>& dense);

/// Densified initial state pushed through the stage matrices in order.
std::vector<c64> run_dense_pipeline(const ExperimentProgram& program);

}  // namespace qreg::oracle
