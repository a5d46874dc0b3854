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

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qembed/errors.hpp"

namespace qembed {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Absolute tolerance for hermiticity checks.
inline constexpr double kHermitianTol = 1e-9;
/// Default tolerance on the smallest eigenvalue for positivity checks.
inline constexpr double kPsdTol = 1e-8;

/// Factor indices into a SubsystemDims: 0 is the principal, l >= 1 is auxiliary l.
using Slots = std::vector<std::size_t>;

/// Dimensions of the principal system and its M auxiliaries, in the
/// canonical factor order (principal, aux 1, ..., aux M).
class SubsystemDims {
public:
    SubsystemDims() : principal_(1) {}
    SubsystemDims(std::size_t principal, std::vector<std::size_t> aux);

    std::size_t principal() const { return principal_; }
    const std::vector<std::size_t>& aux() const { return aux_; }
    std::size_t num_baths() const { return aux_.size(); }
    std::size_t num_factors() const { return aux_.size() + 1; }

    /// Dimension of factor f (0 = principal).
    std::size_t factor(std::size_t f) const;
    std::vector<std::size_t> factors() const;

    /// Product of all auxiliary dimensions.
    std::size_t aux_total() const;
    /// Full dimension D = d_s * prod d_l.
    std::size_t total() const { return principal_ * aux_total(); }
    /// Product of the dimensions of the given factors.
    std::size_t slot_dim(const Slots& slots) const;

    bool operator==(const SubsystemDims&) const = default;

private:
    std::size_t principal_;
    std::vector<std::size_t> aux_;
};

CMatrix identity(std::size_t n);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Pads `op` with identities on every factor outside `slots`. Slots must be a
/// contiguous run in canonical order.
CMatrix embed(const CMatrix& op, const Slots& slots, const SubsystemDims& dims);

/// Like embed() but accepts any strictly increasing slot set, e.g. {0, 2} for
/// an operator on principal and auxiliary 2.
CMatrix embed_scattered(const CMatrix& op, const Slots& slots, const SubsystemDims& dims);

/// Traces out every factor not listed in `keep` (strictly increasing).
CMatrix partial_trace(const CMatrix& x, const SubsystemDims& dims, const Slots& keep);

struct PsdReport {
    bool positive = false;
    double min_eigenvalue = 0.0;
};

/// Positivity test on a hermitian matrix. Throws HermiticityError otherwise.
PsdReport psd_check(const CMatrix& x, double tol = kPsdTol);

double fro_dist(const CMatrix& a, const CMatrix& b);

/// max_jk |X_jk - conj(X_kj)|.
double hermiticity_defect(const CMatrix& x);

inline bool is_hermitian(const CMatrix& x, double tol = kHermitianTol) {
    return x.rows() == x.cols() && hermiticity_defect(x) <= tol;
}

/// Largest entrywise modulus of a - b.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// Builds a matrix from row-major entries.
CMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

/// Standard single-qubit operators. Basis order is |e> = (1,0), |g> = (0,1).
namespace qubit {
CMatrix sigma_x();
CMatrix sigma_y();
CMatrix sigma_z();
/// |g><e|
CMatrix sigma_minus();
/// |e><g|
CMatrix sigma_plus();
CMatrix excited();
CMatrix ground();
/// |+><+| with |+> = (|e> + |g>)/sqrt(2)
CMatrix plus();
} // namespace qubit

} // namespace qembed
