// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

// Square block-banded matrices and an LU without inter-block pivoting.

#pragma once

#include <vector>

#include "m4wm/types.hpp"

namespace m4wm {

class BlockBandMatrix {
 public:
  BlockBandMatrix(int n_blocks, int block_size, int bandwidth);

  int n_blocks() const { return nb_; }
  int block_size() const { return bs_; }
  int bandwidth() const { return bw_; }
  int dim() const { return nb_ * bs_; }
  bool in_band(int i, int j) const { return i >= 0 && j >= 0 && i < nb_ && j < nb_ && std::abs(i - j) <= bw_; }

  MatC& at(int i, int j);
  const MatC& at(int i, int j) const;

  void add_identity(cd s);
  BlockBandMatrix transpose() const;
  MatC dense() const;
  // y = A x for a dense block column stack
  MatC multiply(const MatC& x) const;
  double max_abs() const;

 private:
  int nb_, bs_, bw_;
  std::vector<MatC> blocks_;
};

class BlockBandLU {
 public:
  // Throws Error("singular") if a diagonal pivot underflows rel_tol * max|A|.
  explicit BlockBandLU(BlockBandMatrix a, double rel_tol = 1e-14);

  MatC solve(const MatC& rhs) const;
  double min_pivot() const { return min_pivot_; }
  int dim() const { return a_.dim(); }

 private:
  BlockBandMatrix a_;  // L below the diagonal, U on and above
  std::vector<MatC> inv_diag_;
  double min_pivot_ = 0.0;
};

}  // namespace m4wm
