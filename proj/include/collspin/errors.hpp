// Copyright 2026 The collspin Authors
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

#include <stdexcept>
#include <string>

namespace collspin {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A matrix that should be a physical state is not (not Hermitian, wrong
/// trace, or negative beyond the positivity slack).
class InvalidState : public Error {
public:
    using Error::Error;
};

class InconsistentMoments : public Error {
public:
    using Error::Error;
};

class NoSteadyState : public Error {
public:
    using Error::Error;
};

/// The Liouvillian kernel has more than one dimension at working precision.
class DegenerateSteadyState : public Error {
public:
    DegenerateSteadyState(const std::string& what, int null_dim)
        : Error(what), null_dim_(null_dim) {}

    /// Detected kernel dimension (a lower bound when only estimated).
    int null_dim() const noexcept { return null_dim_; }

private:
    int null_dim_;
};

class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}

    double condition_estimate() const noexcept { return condition_; }

private:
    double condition_;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Adaptive step size collapsed below the allowed minimum.
class StiffnessError : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

/// Operation requested below the semiclassical threshold (gamma <= omega).
class BelowThreshold : public Error {
public:
    using Error::Error;
};

class InvalidBranch : public Error {
public:
    using Error::Error;
};

/// A closed-form expression evaluated to a non-real number.
class ComplexValueError : public Error {
public:
    using Error::Error;
};

}  // namespace collspin
