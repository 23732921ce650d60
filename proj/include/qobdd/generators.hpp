/// @file  generators.hpp
/// @brief Formula families: QUParity, EQ' and graph inner-product QBFs

#pragma once

#include <cstddef>

#include "qobdd/graph.hpp"
#include "qobdd/pcnf.hpp"

namespace qobdd {

/// QUParity_n over x_1..x_n (ids 1..n), z_1, z_2 (ids n+1, n+2) and
/// t_2..t_n (ids n+3..2n+1), prefix ∃x ∀z_1 z_2 ∃t. Throws Error for n < 2.
Pcnf gen_quparity(std::size_t n);

/// Width-4 decomposition: {x1,x2,t2,z1,z2}, {t_i,x_{i+1},t_{i+1},z1,z2} for
/// 2 <= i < n, then {z1,z2,t_n}.
PathDecomposition quparity_decomposition(std::size_t n);

/// EQ'_n over x_i (i), u_i (n+i), t_i (2n+i) and e_1..e_{n-1} (3n+i),
/// prefix ∃x ∀u ∃t e. Only the chain variables that occur in a clause are
/// generated, so e_n does not exist. Throws Error for n < 2.
Pcnf gen_eqprime(std::size_t n);

/// Width-4 decomposition: {x1,u1,t1,e1}, {e_{i-1},x_i,u_i,t_i,e_i}, and
/// {e_{n-1},x_n,u_n,t_n}.
PathDecomposition eqprime_decomposition(std::size_t n);

/// Variable layout of an inner-product QBF built by gen_ipg_qbf.
struct IpgLayout {
  std::size_t inputs = 0;  ///< graph vertices, ids 1..inputs
  Var output = 0;          ///< the universal variable z
  std::size_t gates = 0;   ///< auxiliary gate variables after z
};

/// ∃X ∀z ∃Y. Tseitin(C), where C computes IP_G as a left-deep XOR chain over
/// one AND gate per edge (edges in lexicographic order) and z is C's output.
/// The unique universal winning strategy is z = ¬IP_G(X). An edgeless graph
/// gives the constant circuit 0, i.e. the single clause (¬z).
Pcnf gen_ipg_qbf(const Graph &g, IpgLayout *layout = nullptr);

} // namespace qobdd
