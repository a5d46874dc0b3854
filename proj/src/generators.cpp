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

#include "qembed/generators.hpp"

#include <algorithm>
#include <cmath>

#include "qembed/verify.hpp"

namespace qembed {

// ---------------------------------------------------------------- BlockState

BlockState::BlockState(SubsystemDims dims)
    : dims_(std::move(dims)), n_(dims_.aux_total()) {
    const auto d = static_cast<Eigen::Index>(dims_.principal());
    blocks_.assign(n_ * n_, CMatrix::Zero(d, d));
}

std::size_t BlockState::flat_index(std::span<const std::size_t> multi) const {
    const auto& aux = dims_.aux();
    if (multi.size() != aux.size())
        throw DimensionError("multi-index has " + std::to_string(multi.size()) +
                             " entries, expected " + std::to_string(aux.size()));
    std::size_t flat = 0;
    for (std::size_t l = 0; l < aux.size(); ++l) {
        if (multi[l] >= aux[l])
            throw DimensionError("multi-index entry out of range");
        flat = flat * aux[l] + multi[l];
    }
    return flat;
}

std::vector<std::size_t> BlockState::multi_index(std::size_t flat) const {
    const auto& aux = dims_.aux();
    std::vector<std::size_t> out(aux.size());
    for (std::size_t l = aux.size(); l-- > 0;) {
        out[l] = flat % aux[l];
        flat /= aux[l];
    }
    return out;
}

CMatrix& BlockState::block(std::span<const std::size_t> j, std::span<const std::size_t> k) {
    return block(flat_index(j), flat_index(k));
}

const CMatrix& BlockState::block(std::span<const std::size_t> j,
                                 std::span<const std::size_t> k) const {
    return block(flat_index(j), flat_index(k));
}

CMatrix BlockState::reduced() const {
    CMatrix out = block(0, 0);
    for (std::size_t i = 1; i < n_; ++i)
        out += block(i, i);
    return out;
}

Complex BlockState::total_trace() const {
    Complex acc = block(0, 0).trace();
    for (std::size_t i = 1; i < n_; ++i)
        acc += block(i, i).trace();
    return acc;
}

double BlockState::pairing_defect() const {
    double worst = 0.0;
    for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t k = j; k < n_; ++k)
            worst = std::max(worst, max_abs_diff(block(j, k), block(k, j).adjoint()));
    return worst;
}

StateReport inspect(const JointState& state) {
    StateReport r;
    r.trace_error = std::abs(state.rho.trace() - 1.0);
    r.hermiticity_defect = hermiticity_defect(state.rho);
    const CMatrix h = 0.5 * (state.rho + state.rho.adjoint());
    r.min_eigenvalue = Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly)
                           .eigenvalues()
                           .minCoeff();
    return r;
}

StateReport inspect(const BlockState& state) {
    StateReport r = inspect(joint_from_blocks(state));
    r.trace_error = std::abs(state.total_trace() - 1.0);
    r.hermiticity_defect = state.pairing_defect();
    return r;
}

BlockState axpy(const BlockState& y, double c, const BlockState& k) {
    BlockState out = y;
    auto& ob = out.blocks();
    const auto& kb = k.blocks();
    for (std::size_t i = 0; i < ob.size(); ++i)
        ob[i] = y.blocks()[i] + c * kb[i];
    return out;
}

BlockState scaled(const BlockState& y, Complex c) {
    BlockState out = y;
    for (auto& b : out.blocks())
        b *= c;
    return out;
}

double max_abs_diff(const BlockState& a, const BlockState& b) {
    if (a.dims() != b.dims())
        throw DimensionError("block states have different dimensions");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.blocks().size(); ++i)
        worst = std::max(worst, max_abs_diff(a.blocks()[i], b.blocks()[i]));
    return worst;
}

// ------------------------------------------------------------- joint space

CMatrix gksl_rhs(const CMatrix& H, std::span<const CMatrix> Ls, const CMatrix& rho) {
    const auto d = rho.rows();
    if (rho.cols() != d || H.rows() != d || H.cols() != d)
        throw DimensionError("gksl_rhs: H and rho must be square of equal size");
    // The statement order here is mirrored by BlockGenerator::qme_rhs so that a
    // model with one-dimensional auxiliaries reproduces this result exactly.
    CMatrix comm = rho * H;
    comm.noalias() -= H * rho;
    CMatrix out = kI * comm;
    for (const auto& L : Ls) {
        if (L.rows() != d || L.cols() != d)
            throw DimensionError("gksl_rhs: coupling operator has the wrong shape");
        const CMatrix gram = L.adjoint() * L;
        const CMatrix L_dag = L.adjoint();
        const CMatrix left = L * rho;
        out.noalias() += left * L_dag;
        CMatrix anti = gram * rho;
        anti.noalias() += rho * gram;
        out -= 0.5 * anti;
    }
    return out;
}

namespace {

void check_joint(const EmbeddingModel& model, const JointState& state) {
    const auto d = static_cast<Eigen::Index>(model.dims.total());
    if (state.dims != model.dims || state.rho.rows() != d || state.rho.cols() != d)
        throw DimensionError("joint state does not match model dimensions");
}

void check_blocks(const SubsystemDims& dims, const BlockState& bs) {
    if (bs.dims() != dims)
        throw DimensionError("block state does not match model dimensions");
}

CMatrix measured_operator(const CMatrix& probe, Quadrature q) {
    return q == Quadrature::amplitude ? CMatrix(probe) : CMatrix(-kI * probe);
}

} // namespace

CMatrix joint_sme_drift(const EmbeddingModel& model, double t, const JointState& state) {
    check_joint(model, state);
    const FullOperators ops = full_operators(model, t);
    return gksl_rhs(ops.hamiltonian, ops.couplings, state.rho);
}

JointMeasurement joint_sme_meas(const EmbeddingModel& model, double t, const JointState& state,
                                Quadrature quadrature) {
    check_joint(model, state);
    if (!model.probe)
        throw ModelError("measurement requested but the model has no probe field");
    const CMatrix c = measured_operator(embed(model.probe->at(t), principal_slot(), model.dims),
                                        quadrature);
    const CMatrix c_dag = c.adjoint();
    const CMatrix quad = c + c_dag;
    JointMeasurement out;
    out.mval = (quad * state.rho).trace().real();
    out.G = c * state.rho;
    out.G.noalias() += state.rho * c_dag;
    out.G -= out.mval * state.rho;
    return out;
}

// ------------------------------------------------------------ BlockGenerator

BlockGenerator::BlockGenerator(const EmbeddingModel& model, double t, BlockFault fault)
    : dims_(model.dims), n_(model.dims.aux_total()), fault_(fault) {
    if (model.baths.size() != dims_.num_baths())
        throw DimensionError("model bath count does not match its dimensions");
    const auto ds = static_cast<Eigen::Index>(dims_.principal());
    const auto& aux = dims_.aux();

    stride_.assign(aux.size(), 1);
    for (std::size_t l = aux.size(); l-- > 1;)
        stride_[l - 1] = stride_[l] * aux[l];

    // <a|X|b> for X on principal (x) aux l, principal-major local ordering.
    auto split_pair = [&](const CMatrix& x, std::size_t d) {
        if (x.rows() != ds * static_cast<Eigen::Index>(d) || x.cols() != x.rows())
            throw DimensionError("operator on principal and auxiliary has the wrong shape");
        std::vector<CMatrix> out(d * d, CMatrix(ds, ds));
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                for (Eigen::Index s = 0; s < ds; ++s)
                    for (Eigen::Index r = 0; r < ds; ++r)
                        out[a * d + b](s, r) = x(s * static_cast<Eigen::Index>(d) + a,
                                                 r * static_cast<Eigen::Index>(d) + b);
        return out;
    };
    auto split_aux = [&](const CMatrix& x, std::size_t d) {
        if (x.rows() != static_cast<Eigen::Index>(d) || x.cols() != x.rows())
            throw DimensionError("auxiliary operator has the wrong shape");
        std::vector<CMatrix> out(d * d);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                out[a * d + b] = x(a, b) * CMatrix::Identity(ds, ds);
        return out;
    };
    auto gram_of = [](const std::vector<CMatrix>& op, std::size_t d) {
        std::vector<CMatrix> gram(d * d);
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                CMatrix g = op[0 * d + a].adjoint() * op[0 * d + b];
                for (std::size_t c = 1; c < d; ++c)
                    g.noalias() += op[c * d + a].adjoint() * op[c * d + b];
                gram[a * d + b] = std::move(g);
            }
        return gram;
    };

    H_s_ = model.H_s.at(t);
    if (H_s_.rows() != ds || H_s_.cols() != ds)
        throw DimensionError("H_s has the wrong shape");
    if (fault_ == BlockFault::flip_principal_hamiltonian)
        H_s_ = -H_s_;

    for (std::size_t l = 0; l < aux.size(); ++l) {
        const auto& bath = model.baths[l];
        const std::size_t d = aux[l];
        AuxBlocks h{l, split_pair(bath.H_sa.at(t), d), {}};
        const CMatrix& h_a = bath.H_a.at(t);
        if (h_a.rows() != static_cast<Eigen::Index>(d) || h_a.cols() != h_a.rows())
            throw DimensionError("H_a has the wrong shape");
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                CMatrix e = h_a(a, b) * CMatrix::Identity(ds, ds) + h.op[a * d + b];
                h.op[a * d + b] = fault_ == BlockFault::flip_aux_hamiltonian ? CMatrix(-e) : e;
            }
        ham_.push_back(std::move(h));

        for (const auto& op : bath.L1) {
            AuxBlocks x{l, split_pair(op.at(t), d), {}};
            x.gram = gram_of(x.op, d);
            diss_.push_back(std::move(x));
        }
        for (const auto& op : bath.L2) {
            AuxBlocks x{l, split_aux(op.at(t), d), {}};
            x.gram = gram_of(x.op, d);
            diss_.push_back(std::move(x));
        }
    }

    diag_ham_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        CMatrix h = H_s_;
        for (std::size_t l = 0; l < aux.size(); ++l) {
            const std::size_t kl = (k / stride_[l]) % aux[l];
            h += ham_[l].op[kl * aux[l] + kl];
        }
        diag_ham_[k] = std::move(h);
    }

    if (model.probe) {
        has_probe_ = true;
        probe_ = model.probe->at(t);
        if (probe_.rows() != ds || probe_.cols() != ds)
            throw DimensionError("probe has the wrong shape");
        probe_gram_ = probe_.adjoint() * probe_;
    }
}

BlockState BlockGenerator::hs_term(const BlockState& bs) const {
    check_blocks(dims_, bs);
    BlockState out(dims_);
    for (std::size_t i = 0; i < n_ * n_; ++i) {
        const CMatrix& r = bs.blocks()[i];
        CMatrix comm = r * H_s_;
        comm.noalias() -= H_s_ * r;
        out.blocks()[i] = kI * comm;
    }
    return out;
}

BlockState BlockGenerator::aux_term(std::size_t bath, const BlockState& bs) const {
    check_blocks(dims_, bs);
    if (bath >= ham_.size())
        throw DimensionError("bath index " + std::to_string(bath) + " out of range");
    const auto& h = ham_[bath];
    const std::size_t d = dims_.aux()[bath];
    const std::size_t st = stride_[bath];
    BlockState out(dims_);
    for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t jl = (j / st) % d;
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t kl = (k / st) % d;
            CMatrix comm = CMatrix::Zero(bs.block(j, k).rows(), bs.block(j, k).cols());
            for (std::size_t a = 0; a < d; ++a) {
                const std::size_t k_sub = k + a * st - kl * st;
                const std::size_t j_sub = j + a * st - jl * st;
                comm.noalias() += bs.block(j, k_sub) * h.op[a * d + kl];
                comm.noalias() -= h.op[jl * d + a] * bs.block(j_sub, k);
            }
            out.block(j, k) = kI * comm;
        }
    }
    return out;
}

void BlockGenerator::add_hamiltonian(const BlockState& bs, BlockState& out) const {
    const auto& aux = dims_.aux();
    for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t k = 0; k < n_; ++k) {
            // (rho H)^{j;k}: diagonal term first, then one-slot neighbours of k.
            CMatrix comm = bs.block(j, k) * diag_ham_[k];
            for (std::size_t l = 0; l < aux.size(); ++l) {
                const std::size_t d = aux[l], st = stride_[l];
                const std::size_t kl = (k / st) % d;
                for (std::size_t a = 0; a < d; ++a)
                    if (a != kl)
                        comm.noalias() += bs.block(j, k + a * st - kl * st) * ham_[l].op[a * d + kl];
            }
            comm.noalias() -= diag_ham_[j] * bs.block(j, k);
            for (std::size_t l = 0; l < aux.size(); ++l) {
                const std::size_t d = aux[l], st = stride_[l];
                const std::size_t jl = (j / st) % d;
                for (std::size_t a = 0; a < d; ++a)
                    if (a != jl)
                        comm.noalias() -= ham_[l].op[jl * d + a] * bs.block(j + a * st - jl * st, k);
            }
            out.block(j, k) = kI * comm;
        }
}

void BlockGenerator::add_dissipators(const BlockState& bs, BlockState& out) const {
    const double sandwich_sign = fault_ == BlockFault::flip_dissipator ? -1.0 : 1.0;
    const auto& aux = dims_.aux();
    if (has_probe_) {
        const CMatrix probe_dag = probe_.adjoint();
        for (std::size_t i = 0; i < n_ * n_; ++i) {
            const CMatrix& r = bs.blocks()[i];
            CMatrix& o = out.blocks()[i];
            const CMatrix left = probe_ * r;
            if (sandwich_sign > 0)
                o.noalias() += left * probe_dag;
            else
                o.noalias() -= left * probe_dag;
            CMatrix anti = probe_gram_ * r;
            anti.noalias() += r * probe_gram_;
            o -= 0.5 * anti;
        }
    }
    for (const auto& x : diss_) {
        const std::size_t d = aux[x.bath], st = stride_[x.bath];
        std::vector<CMatrix> adj(d * d);
        for (std::size_t i = 0; i < d * d; ++i)
            adj[i] = x.op[i].adjoint();
        for (std::size_t j = 0; j < n_; ++j) {
            const std::size_t jl = (j / st) % d;
            const std::size_t j0 = j - jl * st;
            for (std::size_t k = 0; k < n_; ++k) {
                const std::size_t kl = (k / st) % d;
                const std::size_t k0 = k - kl * st;
                CMatrix& o = out.block(j, k);
                for (std::size_t r = 0; r < d; ++r)
                    for (std::size_t s = 0; s < d; ++s) {
                        const CMatrix left = x.op[jl * d + r] * bs.block(j0 + r * st, k0 + s * st);
                        if (sandwich_sign > 0)
                            o.noalias() += left * adj[kl * d + s];
                        else
                            o.noalias() -= left * adj[kl * d + s];
                    }
                CMatrix anti = x.gram[jl * d + 0] * bs.block(j0, k);
                for (std::size_t r = 1; r < d; ++r)
                    anti.noalias() += x.gram[jl * d + r] * bs.block(j0 + r * st, k);
                for (std::size_t r = 0; r < d; ++r)
                    anti.noalias() += bs.block(j, k0 + r * st) * x.gram[r * d + kl];
                o -= 0.5 * anti;
            }
        }
    }
}

BlockState BlockGenerator::dissipator_term(const BlockState& bs) const {
    check_blocks(dims_, bs);
    BlockState out(dims_);
    add_dissipators(bs, out);
    return out;
}

BlockState BlockGenerator::qme_rhs(const BlockState& bs) const {
    check_blocks(dims_, bs);
    BlockState out(dims_);
    add_hamiltonian(bs, out);
    add_dissipators(bs, out);
    return out;
}

BlockMeasurement BlockGenerator::meas_term(const BlockState& bs, Quadrature quadrature) const {
    check_blocks(dims_, bs);
    if (!has_probe_)
        throw ModelError("measurement requested but the model has no probe field");
    const CMatrix c = measured_operator(probe_, quadrature);
    const CMatrix c_dag = c.adjoint();
    const CMatrix quad = c + c_dag;
    BlockMeasurement out{BlockState(dims_), 0.0};
    out.mval = (quad * bs.reduced()).trace().real();
    for (std::size_t i = 0; i < n_ * n_; ++i) {
        const CMatrix& r = bs.blocks()[i];
        CMatrix g = c * r;
        g.noalias() += r * c_dag;
        g -= out.mval * r;
        out.G.blocks()[i] = fault_ == BlockFault::flip_measurement ? CMatrix(-g) : g;
    }
    return out;
}

BlockState block_hs_term(const EmbeddingModel& model, double t, const BlockState& bs) {
    return BlockGenerator(model, t).hs_term(bs);
}

BlockState block_aux_term(const EmbeddingModel& model, double t, std::size_t bath,
                          const BlockState& bs) {
    if (bath >= model.baths.size())
        throw DimensionError("bath index " + std::to_string(bath) + " out of range");
    return BlockGenerator(model, t).aux_term(bath, bs);
}

BlockState block_dissipator_term(const EmbeddingModel& model, double t, const BlockState& bs) {
    return BlockGenerator(model, t).dissipator_term(bs);
}

BlockMeasurement block_meas_term(const EmbeddingModel& model, double t, const BlockState& bs,
                                 Quadrature quadrature) {
    return BlockGenerator(model, t).meas_term(bs, quadrature);
}

BlockState block_qme_rhs(const EmbeddingModel& model, double t, const BlockState& bs) {
    return BlockGenerator(model, t).qme_rhs(bs);
}

CollapsedGenerator collapse_trivial_aux(const EmbeddingModel& model, double t) {
    const auto& dims = model.dims;
    for (std::size_t d : dims.aux())
        if (d != 1)
            throw DimensionError("collapse_trivial_aux requires one-dimensional auxiliaries");
    const auto ds = static_cast<Eigen::Index>(dims.principal());
    CollapsedGenerator out;
    out.H = model.H_s.at(t);
    for (const auto& bath : model.baths)
        out.H += bath.H_a.at(t)(0, 0) * CMatrix::Identity(ds, ds) + bath.H_sa.at(t);
    if (model.probe)
        out.Ls.push_back(model.probe->at(t));
    for (const auto& bath : model.baths) {
        for (const auto& op : bath.L1)
            out.Ls.push_back(op.at(t));
        for (const auto& op : bath.L2)
            out.Ls.push_back(op.at(t)(0, 0) * CMatrix::Identity(ds, ds));
    }
    return out;
}

} // namespace qembed
