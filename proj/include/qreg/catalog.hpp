#pragma once

#include <vector>

#include "qreg/rewrite.hpp"

namespace qreg {

/// Von Neumann test with d outcomes: one rule
///   A+_src -> sum_i amps[i] * A+_outs[i].
/// Covers two-outcome splitters (Stern-Gerlach, Wollaston prism) as the
/// d = 2 case. Amplitudes are not required to be normalised; check_isometry
/// reports any probability loss.
Stage pvm_test(int src, const std::vector<int>& outs, const std::vector<c64>& amps);

/// Lossless two-port beam splitter with coefficient matrix
/// e^{i eta} [[a, b], [-conj(b), conj(a)]]:
///   A+_in1 -> e^{i eta} ( a * A+_out1 - conj(b) * A+_out2 )
///   A+_in2 -> e^{i eta} ( b * A+_out1 + conj(a) * A+_out2 )
/// Requires |a|^2 + |b|^2 = 1 and four distinct qubits. Feeding only one
/// input port (the other acting as a void port) recovers the single-beam
/// picture.
Stage beam_splitter(int in1, int in2, int out1, int out2, c64 a, c64 b, double eta);

/// Single lossless channel: A+_src -> factor * A+_dst with |factor| = 1.
/// Models phase shifters, mirrors and polarization rotations.
Stage single_channel_map(int src, int dst, c64 factor);

struct PairTerm {
  c64 coeff;
  int q_a;
  int q_b;
};

/// Rank-raising source: one excitation becomes an entangled two-site
/// superposition, A+_src -> sum_k coeff_k * A+_{q_a,k} A+_{q_b,k}.
/// Coefficients must satisfy sum |coeff|^2 = 1; no pair may involve src.
Stage pair_source(int src, const std::vector<PairTerm>& pairs);

}  // namespace qreg
