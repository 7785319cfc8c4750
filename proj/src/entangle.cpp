// Copyright 2026 The m4wm Authors
// SPDX-License-Identifier: Apache-2.0

#include "m4wm/entangle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace m4wm {

namespace {

void check_mode(const CovarianceMatrix& v, int i) {
  if (i < 0 || i >= v.dim()) throw Error("dimension", fmt::format("mode position {} outside CM of {} modes", i, v.dim()));
}

double quad_form(const MatR& v, const VecR& d) { return d.dot(v * d); }

}  // namespace

double noise_difference(const CovarianceMatrix& v, int i, int j) {
  check_mode(v, i);
  check_mode(v, j);
  VecR d = VecR::Zero(v.v.rows());
  d(2 * i) += 1.0;
  d(2 * j) -= 1.0;
  return quad_form(v.v, d);
}

double total_noise_difference(const CovarianceMatrix& v, const std::vector<std::pair<int, int>>& pairs) {
  VecR d = VecR::Zero(v.v.rows());
  for (const auto& [i, j] : pairs) {
    check_mode(v, i);
    check_mode(v, j);
    d(2 * i) += 1.0;
    d(2 * j) -= 1.0;
  }
  return quad_form(v.v, d);
}

std::vector<std::pair<int, int>> phase_matched_pairs(const CovarianceMatrix& v) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < v.dim(); ++i) {
    if (v.modes[i].channel != kProbe) continue;
    for (int j = 0; j < v.dim(); ++j)
      if (v.modes[j].channel == kConjugate && v.modes[j].n == -v.modes[i].n) out.emplace_back(i, j);
  }
  return out;
}

IntensityNoise intensity_spectra(const CovarianceMatrix& v, const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != v.dim()) throw Error("dimension", "one weight per mode required");
  VecR da = VecR::Zero(v.v.rows()), db = VecR::Zero(v.v.rows());
  for (int i = 0; i < v.dim(); ++i) (v.modes[i].channel == kProbe ? da : db)(2 * i) = std::abs(weights[i]);
  const double na = da.squaredNorm(), nb = db.squaredNorm();
  IntensityNoise out;
  if (na > 0.0) out.a = quad_form(v.v, da) / na;
  if (nb > 0.0) out.b = quad_form(v.v, db) / nb;
  if (na + nb > 0.0) {
    out.plus = quad_form(v.v, da + db) / (na + nb);
    out.minus = quad_form(v.v, da - db) / (na + nb);
  }
  return out;
}

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

std::vector<int> Bipartition::complement() const {
  std::vector<int> c;
  for (int i = 0; i < d; ++i)
    if (std::find(subset.begin(), subset.end(), i) == subset.end()) c.push_back(i);
  return c;
}

std::string Bipartition::label() const {
  std::string s;
  for (int i : subset) s += std::to_string(i + 1);
  s += '|';
  for (int i : complement()) s += std::to_string(i + 1);
  return s;
}

std::string Bipartition::class_label() const {
  const int k = static_cast<int>(subset.size());
  return fmt::format("{}x{}", std::min(k, d - k), std::max(k, d - k));
}

std::vector<Bipartition> enumerate_bipartitions(int d) {
  if (d < 2 || d > 20) throw Error("config", fmt::format("bipartitions need 2 <= d <= 20, got {}", d));
  std::vector<Bipartition> out;
  for (int size = 1; size <= d / 2; ++size) {
    std::vector<int> sel(size);
    for (int i = 0; i < size; ++i) sel[i] = i;
    while (true) {
      // equal halves: keep the half that holds mode 0
      if (2 * size != d || sel[0] == 0) out.push_back({sel, d});
      int i = size - 1;
      while (i >= 0 && sel[i] == d - size + i) --i;
      if (i < 0) break;
      ++sel[i];
      for (int j = i + 1; j < size; ++j) sel[j] = sel[j - 1] + 1;
    }
  }
  return out;
}

Bipartition parse_bipartition(const std::string& s, int d) {
  const auto bar = s.find('|');
  const std::string left = s.substr(0, bar);
  Bipartition bp{{}, d};
  for (char c : left) {
    const int k = c - '1';
    if (k < 0 || k >= d) throw Error("config", fmt::format("bad bipartition '{}'", s));
    bp.subset.push_back(k);
  }
  std::sort(bp.subset.begin(), bp.subset.end());
  if (bp.subset.empty() || static_cast<int>(bp.subset.size()) >= d)
    throw Error("config", fmt::format("bad bipartition '{}'", s));
  return bp;
}

VecR symplectic_eigenvalues(const MatR& v) {
  const int n = static_cast<int>(v.rows()) / 2;
  const MatC a = kI * (symplectic_form(n) * v).cast<cd>();
  Eigen::ComplexEigenSolver<MatC> es(a, false);
  VecR mags(2 * n);
  for (int i = 0; i < 2 * n; ++i) mags(i) = std::abs(es.eigenvalues()(i));
  std::sort(mags.data(), mags.data() + mags.size());
  // eigenvalues come in +-nu pairs
  VecR nu(n);
  for (int i = 0; i < n; ++i) nu(i) = 0.5 * (mags(2 * i) + mags(2 * i + 1));
  return nu;
}

double ppt_min_eigenvalue(const CovarianceMatrix& v, const Bipartition& bp) {
  if (bp.d != v.dim()) throw Error("dimension", "bipartition size does not match the CM");
  Eigen::SelfAdjointEigenSolver<MatR> psd(v.v, Eigen::EigenvaluesOnly);
  if (psd.eigenvalues().minCoeff() < -1e-8)
    throw Error("physicality", fmt::format("CM not positive semidefinite (min eig {:.3e})", psd.eigenvalues().minCoeff()));
  MatR vt = v.v;
  for (int i : bp.subset) {
    vt.row(2 * i + 1) *= -1.0;
    vt.col(2 * i + 1) *= -1.0;
  }
  return symplectic_eigenvalues(vt).minCoeff();
}

}  // namespace m4wm
