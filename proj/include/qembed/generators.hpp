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

#include <cstddef>
#include <span>
#include <vector>

#include "qembed/linalg.hpp"
#include "qembed/model.hpp"

namespace qembed {

/// Conditional (or averaged) state on principal (x) auxiliaries.
struct JointState {
    SubsystemDims dims;
    CMatrix rho;
};

/// The family of principal-space operators rho^{j;k} = <j| rho_sa |k>, one per
/// pair of auxiliary multi-indices. Multi-indices are flattened row-major with
/// auxiliary 1 most significant, matching the canonical factor order.
class BlockState {
public:
    BlockState() = default;
    /// All blocks zero.
    explicit BlockState(SubsystemDims dims);

    const SubsystemDims& dims() const { return dims_; }
    /// Number of auxiliary basis states, prod_l d_l.
    std::size_t aux_count() const { return n_; }

    CMatrix& block(std::size_t j, std::size_t k) { return blocks_[j * n_ + k]; }
    const CMatrix& block(std::size_t j, std::size_t k) const { return blocks_[j * n_ + k]; }
    CMatrix& block(std::span<const std::size_t> j, std::span<const std::size_t> k);
    const CMatrix& block(std::span<const std::size_t> j, std::span<const std::size_t> k) const;

    std::vector<CMatrix>& blocks() { return blocks_; }
    const std::vector<CMatrix>& blocks() const { return blocks_; }

    std::size_t flat_index(std::span<const std::size_t> multi) const;
    std::vector<std::size_t> multi_index(std::size_t flat) const;

    /// sum_i rho^{i;i}: the reduced principal state.
    CMatrix reduced() const;
    /// sum_i Tr rho^{i;i}
    Complex total_trace() const;
    /// max over (j,k) of |rho^{j;k} - (rho^{k;j})^dag|
    double pairing_defect() const;

private:
    SubsystemDims dims_;
    std::size_t n_ = 0;
    std::vector<CMatrix> blocks_;
};

/// Diagnostics shared by joint and block states.
struct StateReport {
    double trace_error = 0.0;        // |Tr - 1|
    double hermiticity_defect = 0.0; // joint defect or block pairing defect
    double min_eigenvalue = 0.0;     // of the (assembled) joint matrix
};

StateReport inspect(const JointState& state);
StateReport inspect(const BlockState& state);

enum class Quadrature { amplitude, phase };

struct JointMeasurement {
    CMatrix G;
    double mval = 0.0;
};

struct BlockMeasurement {
    BlockState G;
    double mval = 0.0;
};

/// i[rho, H] + sum_L (L rho L^dag - {rho, L^dag L}/2)
CMatrix gksl_rhs(const CMatrix& H, std::span<const CMatrix> Ls, const CMatrix& rho);

CMatrix joint_sme_drift(const EmbeddingModel& model, double t, const JointState& state);
JointMeasurement joint_sme_meas(const EmbeddingModel& model, double t, const JointState& state,
                                Quadrature quadrature);

/// Sign-flip faults that can be injected into the block generator. Used to
/// confirm that the joint/block cross-checks are not vacuous.
enum class BlockFault {
    none,
    flip_principal_hamiltonian,
    flip_aux_hamiltonian,
    flip_dissipator,
    flip_measurement,
};

/// Block-component generator of a model frozen at one instant. Precomputes
/// the auxiliary-basis matrix elements of every operator so repeated
/// evaluations within a schedule segment are cheap.
class BlockGenerator {
public:
    BlockGenerator(const EmbeddingModel& model, double t, BlockFault fault = BlockFault::none);

    const SubsystemDims& dims() const { return dims_; }
    bool has_probe() const { return has_probe_; }

    BlockState hs_term(const BlockState& bs) const;
    BlockState aux_term(std::size_t bath, const BlockState& bs) const;
    BlockState dissipator_term(const BlockState& bs) const;
    BlockMeasurement meas_term(const BlockState& bs, Quadrature quadrature) const;
    /// Coupled QME right-hand side; equals hs + sum_l aux + dissipator.
    BlockState qme_rhs(const BlockState& bs) const;

private:
    // d x d grid of principal operators <a|X|b>, row-major.
    struct AuxBlocks {
        std::size_t bath = 0;  // 0-based
        std::vector<CMatrix> op;
        std::vector<CMatrix> gram;  // blocks of X^dag X (dissipators only)
    };

    void add_dissipators(const BlockState& bs, BlockState& out) const;
    void add_hamiltonian(const BlockState& bs, BlockState& out) const;

    SubsystemDims dims_;
    std::size_t n_ = 0;
    std::vector<std::size_t> stride_;  // per bath, in flattened aux index
    CMatrix H_s_;
    std::vector<AuxBlocks> ham_;       // H_a I + H_sa, per bath
    std::vector<CMatrix> diag_ham_;    // H_s + sum_l ham_l^{k_l,k_l}, per aux index
    bool has_probe_ = false;
    CMatrix probe_;
    CMatrix probe_gram_;
    std::vector<AuxBlocks> diss_;      // L1 and L2 entries in model order
    BlockFault fault_ = BlockFault::none;
};

BlockState block_hs_term(const EmbeddingModel& model, double t, const BlockState& bs);
BlockState block_aux_term(const EmbeddingModel& model, double t, std::size_t bath,
                          const BlockState& bs);
BlockState block_dissipator_term(const EmbeddingModel& model, double t, const BlockState& bs);
BlockMeasurement block_meas_term(const EmbeddingModel& model, double t, const BlockState& bs,
                                 Quadrature quadrature);
BlockState block_qme_rhs(const EmbeddingModel& model, double t, const BlockState& bs);

/// Principal-only Hamiltonian and coupling list of a model whose auxiliaries
/// are all one-dimensional, assembled in the same order as the block generator.
struct CollapsedGenerator {
    CMatrix H;
    std::vector<CMatrix> Ls;
};
CollapsedGenerator collapse_trivial_aux(const EmbeddingModel& model, double t);

// Linear combinations used by the integrators.
BlockState axpy(const BlockState& y, double c, const BlockState& k);
BlockState scaled(const BlockState& y, Complex c);
double max_abs_diff(const BlockState& a, const BlockState& b);

} // namespace qembed
