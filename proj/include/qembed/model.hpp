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
#include <optional>
#include <string>
#include <vector>

#include "qembed/linalg.hpp"

namespace qembed {

struct Segment {
    double t_start = 0.0;
    CMatrix matrix;
};

/// Piecewise-constant operator schedule acting on a fixed set of factors.
/// Evaluation is right-continuous: at a segment boundary the new segment wins.
class TimedOperator {
public:
    TimedOperator() = default;
    TimedOperator(CMatrix constant, Slots target);
    /// Segment starts must be strictly increasing with the first at t = 0, and
    /// every segment matrix must share one square shape.
    TimedOperator(std::vector<Segment> segments, Slots target);

    const CMatrix& at(double t) const;
    std::size_t segment_index(double t) const;

    const std::vector<Segment>& segments() const { return segments_; }
    const Slots& target() const { return target_; }
    bool is_constant() const { return segments_.size() == 1; }
    Eigen::Index rows() const { return segments_.empty() ? 0 : segments_.front().matrix.rows(); }

    bool operator==(const TimedOperator& other) const;

private:
    std::vector<Segment> segments_;
    Slots target_;
};

CMatrix eval_timed(const TimedOperator& op, double t);

/// Auxiliary system l together with its white-noise fields.
struct CompoundBath {
    TimedOperator H_a;          // on aux l
    TimedOperator H_sa;         // on principal (x) aux l
    std::vector<TimedOperator> L1;  // field couplings on principal (x) aux l
    std::vector<TimedOperator> L2;  // field couplings on aux l only

    bool operator==(const CompoundBath&) const = default;
};

struct EmbeddingModel {
    SubsystemDims dims;
    TimedOperator H_s;
    std::optional<TimedOperator> probe;
    std::vector<CompoundBath> baths;

    /// Segment index of every operator at time t, in a fixed order. Two times
    /// with equal keys see identical operators.
    std::vector<std::size_t> segment_key(double t) const;
    /// True when no field couples anywhere (no probe, no L1/L2 entries).
    bool is_closed() const;

    bool operator==(const EmbeddingModel&) const = default;
};

Slots principal_slot();
Slots aux_slot(std::size_t l);
Slots principal_aux_slots(std::size_t l);

struct Violation {
    std::string op;        // e.g. "H_s", "baths[0].L1[0]"
    std::size_t segment;   // offending segment index
    std::string check;     // "hermiticity" | "dimension" | "slots" | "count"
    std::string detail;
};

/// Empty iff every structural and hermiticity invariant holds at every segment.
std::vector<Violation> validate(const EmbeddingModel& model);

/// Single compound bath whose field first drives the auxiliary, then the
/// principal. Induced interaction H_sa = (L_s^dag L_a - L_a^dag L_s) / (2i),
/// collective coupling L_s + L_a.
EmbeddingModel cascade_embedding(const CMatrix& H_s, const CMatrix& L_s,
                                 const CMatrix& H_a, const CMatrix& L_a);

/// Principal coupled to a damped auxiliary only through H_sa.
EmbeddingModel direct_embedding(const CMatrix& H_s, const CMatrix& H_a,
                                const CMatrix& H_sa, const CMatrix& L_a);

/// Fully embedded operators of a model at one instant.
struct FullOperators {
    CMatrix hamiltonian;
    std::vector<CMatrix> couplings;     // probe first, then per bath L1..., L2...
    std::optional<CMatrix> probe;
};

FullOperators full_operators(const EmbeddingModel& model, double t);

} // namespace qembed
