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
#include <stdexcept>
#include <string>

namespace qembed {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape or factor-dimension mismatch.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An operator required to be hermitian is not (within 1e-9).
class HermiticityError : public Error {
public:
    using Error::Error;
};

/// Structural problem with a model (bad schedule, missing probe, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

/// An integration step could not be completed.
class StepError : public Error {
public:
    StepError(std::size_t step, const std::string& what)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

} // namespace qembed
