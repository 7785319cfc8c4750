// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#include "m4wm/banded.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace m4wm {

BlockBandMatrix::BlockBandMatrix(int n_blocks, int block_size, int bandwidth)
    : nb_(n_blocks), bs_(block_size), bw_(std::max(0, std::min(bandwidth, n_blocks - 1))) {
  if (n_blocks < 1 || block_size < 1) throw Error("dimension", "empty block-band matrix");
  blocks_.assign(static_cast<size_t>(nb_) * (2 * bw_ + 1), MatC::Zero(bs_, bs_));
}

MatC& BlockBandMatrix::at(int i, int j) {
  if (!in_band(i, j)) throw Error("dimension", fmt::format("block ({}, {}) outside band", i, j));
  return blocks_[static_cast<size_t>(i) * (2 * bw_ + 1) + (j - i + bw_)];
}

const MatC& BlockBandMatrix::at(int i, int j) const {
  if (!in_band(i, j)) throw Error("dimension", fmt::format("block ({}, {}) outside band", i, j));
  return blocks_[static_cast<size_t>(i) * (2 * bw_ + 1) + (j - i + bw_)];
}

void BlockBandMatrix::add_identity(cd s) {
  for (int i = 0; i < nb_; ++i) at(i, i).diagonal().array() += s;
}

BlockBandMatrix BlockBandMatrix::transpose() const {
  BlockBandMatrix t(nb_, bs_, bw_);
  for (int i = 0; i < nb_; ++i)
    for (int j = std::max(0, i - bw_); j <= std::min(nb_ - 1, i + bw_); ++j) t.at(j, i) = at(i, j).transpose();
  return t;
}

MatC BlockBandMatrix::dense() const {
  MatC d = MatC::Zero(dim(), dim());
  for (int i = 0; i < nb_; ++i)
    for (int j = std::max(0, i - bw_); j <= std::min(nb_ - 1, i + bw_); ++j)
      d.block(i * bs_, j * bs_, bs_, bs_) = at(i, j);
  return d;
}

MatC BlockBandMatrix::multiply(const MatC& x) const {
  if (x.rows() != dim()) throw Error("dimension", "block-band multiply: row mismatch");
  MatC y = MatC::Zero(dim(), x.cols());
  for (int i = 0; i < nb_; ++i)
    for (int j = std::max(0, i - bw_); j <= std::min(nb_ - 1, i + bw_); ++j)
      y.middleRows(i * bs_, bs_).noalias() += at(i, j) * x.middleRows(j * bs_, bs_);
  return y;
}

double BlockBandMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

BlockBandLU::BlockBandLU(BlockBandMatrix a, double rel_tol) : a_(std::move(a)) {
  const int nb = a_.n_blocks(), bw = a_.bandwidth();
  const double scale = std::max(a_.max_abs(), std::numeric_limits<double>::min());
  inv_diag_.resize(nb);
  min_pivot_ = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nb; ++i) {
    Eigen::PartialPivLU<MatC> lu(a_.at(i, i));
    const double piv = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    min_pivot_ = std::min(min_pivot_, piv);
    if (!(piv > rel_tol * scale))
      throw Error("singular", fmt::format("singular block system: smallest pivot {:.3e} at block {}", piv, i));
    inv_diag_[i] = lu.inverse();
    const int last = std::min(nb - 1, i + bw);
    for (int r = i + 1; r <= last; ++r) {
      MatC l = a_.at(r, i) * inv_diag_[i];
      for (int c = i + 1; c <= last; ++c) a_.at(r, c).noalias() -= l * a_.at(i, c);
      a_.at(r, i) = std::move(l);
    }
  }
}

MatC BlockBandLU::solve(const MatC& rhs) const {
  const int nb = a_.n_blocks(), bw = a_.bandwidth(), bs = a_.block_size();
  if (rhs.rows() != a_.dim()) throw Error("dimension", "block-band solve: rhs row mismatch");
  MatC y = rhs;
  for (int r = 0; r < nb; ++r)
    for (int i = std::max(0, r - bw); i < r; ++i)
      y.middleRows(r * bs, bs).noalias() -= a_.at(r, i) * y.middleRows(i * bs, bs);
  for (int i = nb - 1; i >= 0; --i) {
    for (int c = i + 1; c <= std::min(nb - 1, i + bw); ++c)
      y.middleRows(i * bs, bs).noalias() -= a_.at(i, c) * y.middleRows(c * bs, bs);
    y.middleRows(i * bs, bs) = (inv_diag_[i] * y.middleRows(i * bs, bs)).eval();
  }
  return y;
}

}  // namespace m4wm
