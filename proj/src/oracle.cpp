#include "qreg/oracle.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace qreg::oracle {
namespace {

void require_dense_rank(RegisterShape shape) {
  if (shape.rank > max_dense_rank) {
    throw std::invalid_argument("dense oracle limited to rank <= " +
                                std::to_string(max_dense_rank) + ", got " +
                                std::to_string(shape.rank));
  }
}

// Single-qubit matrices indexed by occupation (row = new, col = old), the
// ordering under which the register component index equals the basis index.
struct Mat2x2 {
  c64 m[2][2];
};

constexpr Mat2x2 kIdentity{{{c64(1.0, 0.0), c64(0.0, 0.0)}, {c64(0.0, 0.0), c64(1.0, 0.0)}}};
constexpr Mat2x2 kCreate{{{c64(0.0, 0.0), c64(0.0, 0.0)}, {c64(1.0, 0.0), c64(0.0, 0.0)}}};

// acc (dim d) -> factor (x) acc, with the new factor as the slowest-varying
// (leftmost) tensor position.
std::vector<c64> kron_grow(const std::vector<c64>& acc, std::size_t d, const Mat2x2& factor) {
  std::vector<c64> out(4 * d * d, c64(0.0, 0.0));
  const std::size_t dim = 2 * d;
  for (std::size_t fr = 0; fr < 2; ++fr) {
    for (std::size_t fc = 0; fc < 2; ++fc) {
      const c64 f = factor.m[fr][fc];
      if (f == c64(0.0, 0.0)) continue;
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
          out[(fr * d + r) * dim + (fc * d + c)] = f * acc[r * d + c];
        }
      }
    }
  }
  return out;
}

}  // namespace

DenseOperator identity(RegisterShape shape) {
  require_dense_rank(shape);
  DenseOperator op{shape.rank, {}};
  op.entries.assign(op.dim() * op.dim(), c64(0.0, 0.0));
  for (std::size_t k = 0; k < op.dim(); ++k) op.at(k, k) = c64(1.0, 0.0);
  return op;
}

DenseOperator multiply(const DenseOperator& x, const DenseOperator& y) {
  if (x.rank != y.rank) throw std::invalid_argument("dense operator rank mismatch");
  const std::size_t dim = x.dim();
  DenseOperator out{x.rank, std::vector<c64>(dim * dim, c64(0.0, 0.0))};
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t k = 0; k < dim; ++k) {
      const c64 v = x.at(r, k);
      if (v == c64(0.0, 0.0)) continue;
      for (std::size_t c = 0; c < dim; ++c) out.at(r, c) += v * y.at(k, c);
    }
  }
  return out;
}

std::vector<c64> apply_operator(const DenseOperator& op, const std::vector<c64>& vec) {
  if (vec.size() != op.dim()) throw std::invalid_argument("dense vector dimension mismatch");
  std::vector<c64> out(op.dim(), c64(0.0, 0.0));
  for (std::size_t r = 0; r < op.dim(); ++r) {
    c64 sum(0.0, 0.0);
    for (std::size_t c = 0; c < op.dim(); ++c) sum += op.at(r, c) * vec[c];
    out[r] = sum;
  }
  return out;
}

DenseOperator dense_monomial(const CreationMonomial& monomial, RegisterShape shape) {
  require_dense_rank(shape);
  if (monomial.max_index() >= shape.rank) {
    throw std::invalid_argument("monomial qubit out of range for rank " +
                                std::to_string(shape.rank));
  }
  // kron_grow puts each new factor in the most-significant slot, so growing
  // from qubit 0 upward leaves qubit 0 as the fastest-varying factor.
  std::vector<c64> acc{c64(1.0, 0.0)};
  std::size_t d = 1;
  for (int j = 0; j < shape.rank; ++j) {
    acc = kron_grow(acc, d, monomial.contains(j) ? kCreate : kIdentity);
    d *= 2;
  }
  return DenseOperator{shape.rank, std::move(acc)};
}

DenseOperator dense_stage(const Stage& stage, RegisterShape shape) {
  require_dense_rank(shape);
  std::map<int, const TransitionRule*> rule_for;
  for (const TransitionRule& rule : stage.rules()) {
    if (rule.source() >= shape.rank) {
      throw std::invalid_argument("stage source qubit out of range");
    }
    for (const auto& target : rule.targets()) {
      if (target.monomial.max_index() >= shape.rank) {
        throw std::invalid_argument("stage target qubit out of range");
      }
    }
    rule_for[rule.source()] = &rule;
  }

  const std::size_t dim = std::size_t{1} << shape.rank;
  DenseOperator out{shape.rank, std::vector<c64>(dim * dim, c64(0.0, 0.0))};
  for (std::size_t col = 0; col < dim; ++col) {
    // Substitute every occupied qubit's factor simultaneously and expand
    // the product; a repeated creation index kills that branch.
    std::vector<std::pair<c64, BasisIndex>> expansion{{c64(1.0, 0.0), 0}};
    for (int q = 0; q < shape.rank; ++q) {
      if (!(col & (std::size_t{1} << q))) continue;
      std::vector<std::pair<c64, BasisIndex>> next;
      auto it = rule_for.find(q);
      if (it == rule_for.end()) {
        const BasisIndex bit = BasisIndex{1} << q;
        for (const auto& [coeff, mask] : expansion) {
          if (mask & bit) continue;
          next.emplace_back(coeff, mask | bit);
        }
      } else {
        for (const auto& [coeff, mask] : expansion) {
          for (const auto& target : it->second->targets()) {
            const BasisIndex target_mask = target.monomial.mask();
            if (mask & target_mask) continue;
            next.emplace_back(coeff * target.coeff, mask | target_mask);
          }
        }
      }
      expansion = std::move(next);
    }
    for (const auto& [coeff, mask] : expansion) out.at(mask, col) += coeff;
  }
  return out;
}

std::vector<c64> densify(const SparseState& state) {
  require_dense_rank(state.shape());
  std::vector<c64> vec(std::size_t{1} << state.shape().rank, c64(0.0, 0.0));
  for (const auto& [index, amp] : state.terms()) vec[index] = amp;
  return vec;
}

double compare_states(const SparseState& state, const std::vector<c64>& dense) {
  const std::vector<c64> sparse = densify(state);
  if (sparse.size() != dense.size()) {
    throw std::invalid_argument("dense comparison dimension mismatch");
  }
  double max_dev = 0.0;
  for (std::size_t k = 0; k < dense.size(); ++k) {
    max_dev = std::max(max_dev, std::abs(sparse[k] - dense[k]));
  }
  return max_dev;
}

std::vector<c64> run_dense_pipeline(const ExperimentProgram& program) {
  require_dense_rank(program.shape);
  std::vector<c64> vec = densify(program.initial);
  for (const Stage& stage : program.stages) {
    vec = apply_operator(dense_stage(stage, program.shape), vec);
  }
  return vec;
}

}  // namespace qreg::oracle
