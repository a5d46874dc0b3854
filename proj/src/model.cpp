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

#include "qembed/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qembed {

TimedOperator::TimedOperator(CMatrix constant, Slots target)
    : TimedOperator(std::vector<Segment>{{0.0, std::move(constant)}}, std::move(target)) {}

TimedOperator::TimedOperator(std::vector<Segment> segments, Slots target)
    : segments_(std::move(segments)), target_(std::move(target)) {
    if (segments_.empty())
        throw ModelError("timed operator needs at least one segment");
    if (segments_.front().t_start != 0.0)
        throw ModelError("first segment must start at t = 0");
    const auto& first = segments_.front().matrix;
    if (first.rows() != first.cols() || first.rows() == 0)
        throw DimensionError("segment matrices must be square and non-empty");
    for (std::size_t i = 1; i < segments_.size(); ++i) {
        if (!(segments_[i].t_start > segments_[i - 1].t_start))
            throw ModelError("segment start times must be strictly increasing");
        if (segments_[i].matrix.rows() != first.rows() || segments_[i].matrix.cols() != first.cols())
            throw DimensionError("all segments must share one shape");
    }
    if (target_.empty())
        throw ModelError("timed operator needs a target slot set");
}

std::size_t TimedOperator::segment_index(double t) const {
    if (t < 0.0)
        throw ModelError("cannot evaluate an operator at negative time");
    if (segments_.empty())
        throw ModelError("evaluating an empty timed operator");
    const auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                     [](double v, const Segment& s) { return v < s.t_start; });
    return static_cast<std::size_t>(it - segments_.begin()) - 1;
}

const CMatrix& TimedOperator::at(double t) const { return segments_[segment_index(t)].matrix; }

bool TimedOperator::operator==(const TimedOperator& other) const {
    if (target_ != other.target_ || segments_.size() != other.segments_.size())
        return false;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& a = segments_[i];
        const auto& b = other.segments_[i];
        if (a.t_start != b.t_start || a.matrix.rows() != b.matrix.rows() ||
            a.matrix.cols() != b.matrix.cols() || a.matrix != b.matrix)
            return false;
    }
    return true;
}

CMatrix eval_timed(const TimedOperator& op, double t) { return op.at(t); }

Slots principal_slot() { return {0}; }
Slots aux_slot(std::size_t l) { return {l}; }
Slots principal_aux_slots(std::size_t l) { return {0, l}; }

std::vector<std::size_t> EmbeddingModel::segment_key(double t) const {
    std::vector<std::size_t> key{H_s.segment_index(t)};
    if (probe)
        key.push_back(probe->segment_index(t));
    for (const auto& bath : baths) {
        key.push_back(bath.H_a.segment_index(t));
        key.push_back(bath.H_sa.segment_index(t));
        for (const auto& op : bath.L1)
            key.push_back(op.segment_index(t));
        for (const auto& op : bath.L2)
            key.push_back(op.segment_index(t));
    }
    return key;
}

bool EmbeddingModel::is_closed() const {
    if (probe)
        return false;
    return std::all_of(baths.begin(), baths.end(),
                       [](const CompoundBath& b) { return b.L1.empty() && b.L2.empty(); });
}

namespace {

std::string fmt_defect(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void check_operator(const TimedOperator& op, const std::string& name, const Slots& expected,
                    const SubsystemDims& dims, bool hermitian, std::vector<Violation>& out) {
    if (op.segments().empty()) {
        out.push_back({name, 0, "dimension", "operator is missing"});
        return;
    }
    if (op.target() != expected) {
        out.push_back({name, 0, "slots", "operator targets the wrong factors"});
        return;
    }
    const auto want = static_cast<Eigen::Index>(dims.slot_dim(expected));
    for (std::size_t s = 0; s < op.segments().size(); ++s) {
        const auto& m = op.segments()[s].matrix;
        if (m.rows() != want || m.cols() != want) {
            out.push_back({name, s, "dimension",
                           "expected " + std::to_string(want) + "x" + std::to_string(want) +
                               ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols())});
            continue;
        }
        if (!m.allFinite()) {
            out.push_back({name, s, "finite", "non-finite entry"});
            continue;
        }
        if (hermitian) {
            const double defect = hermiticity_defect(m);
            if (defect > kHermitianTol)
                out.push_back({name, s, "hermiticity", "defect " + fmt_defect(defect)});
        }
    }
}

void require_hermitian(const CMatrix& m, const char* name) {
    if (m.rows() != m.cols())
        throw DimensionError(std::string(name) + " must be square");
    const double defect = hermiticity_defect(m);
    if (defect > kHermitianTol)
        throw HermiticityError(std::string(name) + " is not hermitian (defect " +
                               fmt_defect(defect) + ")");
}

void require_square(const CMatrix& m, Eigen::Index n, const char* name) {
    if (m.rows() != n || m.cols() != n)
        throw DimensionError(std::string(name) + " has the wrong shape");
}

} // namespace

std::vector<Violation> validate(const EmbeddingModel& model) {
    std::vector<Violation> out;
    const auto& dims = model.dims;
    if (dims.num_baths() != model.baths.size())
        out.push_back({"baths", 0, "count",
                       "dims declare " + std::to_string(dims.num_baths()) + " auxiliaries, model has " +
                           std::to_string(model.baths.size()) + " baths"});
    check_operator(model.H_s, "H_s", principal_slot(), dims, true, out);
    if (model.probe)
        check_operator(*model.probe, "probe", principal_slot(), dims, false, out);
    const std::size_t m = std::min(dims.num_baths(), model.baths.size());
    for (std::size_t l = 0; l < m; ++l) {
        const auto& bath = model.baths[l];
        const std::string base = "baths[" + std::to_string(l) + "]";
        check_operator(bath.H_a, base + ".H_a", aux_slot(l + 1), dims, true, out);
        check_operator(bath.H_sa, base + ".H_sa", principal_aux_slots(l + 1), dims, true, out);
        for (std::size_t k = 0; k < bath.L1.size(); ++k)
            check_operator(bath.L1[k], base + ".L1[" + std::to_string(k) + "]",
                           principal_aux_slots(l + 1), dims, false, out);
        for (std::size_t k = 0; k < bath.L2.size(); ++k)
            check_operator(bath.L2[k], base + ".L2[" + std::to_string(k) + "]", aux_slot(l + 1),
                           dims, false, out);
    }
    return out;
}

EmbeddingModel cascade_embedding(const CMatrix& H_s, const CMatrix& L_s, const CMatrix& H_a,
                                 const CMatrix& L_a) {
    require_hermitian(H_s, "H_s");
    require_hermitian(H_a, "H_a");
    require_square(L_s, H_s.rows(), "L_s");
    require_square(L_a, H_a.rows(), "L_a");

    SubsystemDims dims(static_cast<std::size_t>(H_s.rows()), {static_cast<std::size_t>(H_a.rows())});
    const CMatrix ls = kron(L_s, identity(dims.aux()[0]));
    const CMatrix la = kron(identity(dims.principal()), L_a);
    const CMatrix h_sa = (ls.adjoint() * la - la.adjoint() * ls) / (2.0 * kI);

    EmbeddingModel model;
    model.dims = dims;
    model.H_s = TimedOperator(H_s, principal_slot());
    CompoundBath bath;
    bath.H_a = TimedOperator(H_a, aux_slot(1));
    bath.H_sa = TimedOperator(h_sa, principal_aux_slots(1));
    bath.L1.emplace_back(ls + la, principal_aux_slots(1));
    model.baths.push_back(std::move(bath));
    return model;
}

EmbeddingModel direct_embedding(const CMatrix& H_s, const CMatrix& H_a, const CMatrix& H_sa,
                                const CMatrix& L_a) {
    require_hermitian(H_s, "H_s");
    require_hermitian(H_a, "H_a");
    require_hermitian(H_sa, "H_sa");
    require_square(H_sa, H_s.rows() * H_a.rows(), "H_sa");
    require_square(L_a, H_a.rows(), "L_a");

    EmbeddingModel model;
    model.dims = SubsystemDims(static_cast<std::size_t>(H_s.rows()),
                               {static_cast<std::size_t>(H_a.rows())});
    model.H_s = TimedOperator(H_s, principal_slot());
    CompoundBath bath;
    bath.H_a = TimedOperator(H_a, aux_slot(1));
    bath.H_sa = TimedOperator(H_sa, principal_aux_slots(1));
    bath.L2.emplace_back(L_a, aux_slot(1));
    model.baths.push_back(std::move(bath));
    return model;
}

FullOperators full_operators(const EmbeddingModel& model, double t) {
    const auto& dims = model.dims;
    FullOperators out;
    out.hamiltonian = embed(model.H_s.at(t), principal_slot(), dims);
    if (model.probe) {
        out.probe = embed(model.probe->at(t), principal_slot(), dims);
        out.couplings.push_back(*out.probe);
    }
    for (std::size_t l = 0; l < model.baths.size(); ++l) {
        const auto& bath = model.baths[l];
        const CMatrix h_l = embed(bath.H_a.at(t), aux_slot(l + 1), dims) +
                            embed_scattered(bath.H_sa.at(t), principal_aux_slots(l + 1), dims);
        out.hamiltonian += h_l;
    }
    for (std::size_t l = 0; l < model.baths.size(); ++l) {
        const auto& bath = model.baths[l];
        for (const auto& op : bath.L1)
            out.couplings.push_back(embed_scattered(op.at(t), principal_aux_slots(l + 1), dims));
        for (const auto& op : bath.L2)
            out.couplings.push_back(embed(op.at(t), aux_slot(l + 1), dims));
    }
    return out;
}

} // namespace qembed
