// Copyright 2026 The qembed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qembed/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qembed {

namespace {

void require_increasing(const Slots& slots, std::size_t num_factors, const char* who) {
    if (slots.empty())
        throw DimensionError(std::string(who) + ": empty slot set");
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i] >= num_factors)
            throw DimensionError(std::string(who) + ": slot " + std::to_string(slots[i]) +
                                 " out of range");
        if (i > 0 && slots[i] <= slots[i - 1])
            throw DimensionError(std::string(who) + ": slots must be strictly increasing");
    }
}

// Offsets into the full index for every local index of the selected factors.
// Strides are additive across factors, so a full index is off(sel) + off(rest).
std::vector<std::size_t> factor_offsets(const SubsystemDims& dims, const Slots& slots) {
    const auto f = dims.factors();
    std::vector<std::size_t> stride(f.size(), 1);
    for (std::size_t i = f.size(); i-- > 1;)
        stride[i - 1] = stride[i] * f[i];

    std::vector<std::size_t> offsets{0};
    for (std::size_t s : slots) {
        std::vector<std::size_t> next;
        next.reserve(offsets.size() * f[s]);
        for (std::size_t base : offsets)
            for (std::size_t d = 0; d < f[s]; ++d)
                next.push_back(base + d * stride[s]);
        offsets = std::move(next);
    }
    return offsets;
}

Slots complement(const Slots& slots, std::size_t num_factors) {
    Slots out;
    for (std::size_t f = 0; f < num_factors; ++f)
        if (!std::binary_search(slots.begin(), slots.end(), f))
            out.push_back(f);
    return out;
}

} // namespace

SubsystemDims::SubsystemDims(std::size_t principal, std::vector<std::size_t> aux)
    : principal_(principal), aux_(std::move(aux)) {
    if (principal_ == 0)
        throw DimensionError("principal dimension must be >= 1");
    for (std::size_t l = 0; l < aux_.size(); ++l)
        if (aux_[l] == 0)
            throw DimensionError("auxiliary " + std::to_string(l + 1) + " dimension must be >= 1");
}

std::size_t SubsystemDims::factor(std::size_t f) const {
    if (f == 0)
        return principal_;
    if (f > aux_.size())
        throw DimensionError("factor index " + std::to_string(f) + " out of range");
    return aux_[f - 1];
}

std::vector<std::size_t> SubsystemDims::factors() const {
    std::vector<std::size_t> f{principal_};
    f.insert(f.end(), aux_.begin(), aux_.end());
    return f;
}

std::size_t SubsystemDims::aux_total() const {
    return std::accumulate(aux_.begin(), aux_.end(), std::size_t{1}, std::multiplies<>{});
}

std::size_t SubsystemDims::slot_dim(const Slots& slots) const {
    std::size_t d = 1;
    for (std::size_t s : slots)
        d *= factor(s);
    return d;
}

CMatrix identity(std::size_t n) {
    return CMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix embed(const CMatrix& op, const Slots& slots, const SubsystemDims& dims) {
    require_increasing(slots, dims.num_factors(), "embed");
    for (std::size_t i = 1; i < slots.size(); ++i)
        if (slots[i] != slots[i - 1] + 1)
            throw DimensionError("embed: slot set is not contiguous");
    return embed_scattered(op, slots, dims);
}

CMatrix embed_scattered(const CMatrix& op, const Slots& slots, const SubsystemDims& dims) {
    require_increasing(slots, dims.num_factors(), "embed");
    const auto local = static_cast<Eigen::Index>(dims.slot_dim(slots));
    if (op.rows() != local || op.cols() != local)
        throw DimensionError("embed: operator is " + std::to_string(op.rows()) + "x" +
                             std::to_string(op.cols()) + ", selected factors have dimension " +
                             std::to_string(local));

    const auto sel = factor_offsets(dims, slots);
    const auto rest = factor_offsets(dims, complement(slots, dims.num_factors()));
    const auto d = static_cast<Eigen::Index>(dims.total());
    CMatrix out = CMatrix::Zero(d, d);
    for (std::size_t m : rest)
        for (std::size_t a = 0; a < sel.size(); ++a)
            for (std::size_t b = 0; b < sel.size(); ++b)
                out(sel[a] + m, sel[b] + m) = op(a, b);
    return out;
}

CMatrix partial_trace(const CMatrix& x, const SubsystemDims& dims, const Slots& keep) {
    require_increasing(keep, dims.num_factors(), "partial_trace");
    const auto d = static_cast<Eigen::Index>(dims.total());
    if (x.rows() != d || x.cols() != d)
        throw DimensionError("partial_trace: matrix is " + std::to_string(x.rows()) + "x" +
                             std::to_string(x.cols()) + ", expected " + std::to_string(d));

    const auto kept = factor_offsets(dims, keep);
    const auto traced = factor_offsets(dims, complement(keep, dims.num_factors()));
    const auto n = static_cast<Eigen::Index>(kept.size());
    CMatrix out = CMatrix::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            Complex acc{0.0, 0.0};
            for (std::size_t t : traced)
                acc += x(kept[a] + t, kept[b] + t);
            out(a, b) = acc;
        }
    return out;
}

double hermiticity_defect(const CMatrix& x) {
    if (x.rows() != x.cols())
        throw DimensionError("hermiticity check on a non-square matrix");
    double worst = 0.0;
    for (Eigen::Index j = 0; j < x.rows(); ++j)
        for (Eigen::Index k = j; k < x.cols(); ++k)
            worst = std::max(worst, std::abs(x(j, k) - std::conj(x(k, j))));
    return worst;
}

PsdReport psd_check(const CMatrix& x, double tol) {
    if (!is_hermitian(x))
        throw HermiticityError("psd_check: input is not hermitian (defect " +
                               std::to_string(hermiticity_defect(x)) + ")");
    // Symmetrize so the solver sees an exactly hermitian input.
    const CMatrix h = 0.5 * (x + x.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    return {min_eig >= -tol, min_eig};
}

double fro_dist(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("fro_dist: shape mismatch");
    return (a - b).norm();
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("max_abs_diff: shape mismatch");
    if (a.size() == 0)
        return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

CMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = r == 0 ? 0 : static_cast<Eigen::Index>(rows.begin()->size());
    CMatrix out(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        if (static_cast<Eigen::Index>(row.size()) != c)
            throw DimensionError("from_rows: ragged rows");
        Eigen::Index j = 0;
        for (const auto& v : row)
            out(i, j++) = v;
        ++i;
    }
    return out;
}

namespace qubit {
CMatrix sigma_x() { return from_rows({{0.0, 1.0}, {1.0, 0.0}}); }
CMatrix sigma_y() { return from_rows({{0.0, -kI}, {kI, 0.0}}); }
CMatrix sigma_z() { return from_rows({{1.0, 0.0}, {0.0, -1.0}}); }
CMatrix sigma_minus() { return from_rows({{0.0, 0.0}, {1.0, 0.0}}); }
CMatrix sigma_plus() { return from_rows({{0.0, 1.0}, {0.0, 0.0}}); }
CMatrix excited() { return from_rows({{1.0, 0.0}, {0.0, 0.0}}); }
CMatrix ground() { return from_rows({{0.0, 0.0}, {0.0, 1.0}}); }
CMatrix plus() { return from_rows({{0.5, 0.5}, {0.5, 0.5}}); }
} // namespace qubit

} // namespace qembed
