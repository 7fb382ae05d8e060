/* dcgrid - DC microgrid simulation engine
 * Copyright (c) 2026 The dcgrid Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace dcgrid {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Input errors (CLI exit code 2)
// ---------------------------------------------------------------------------

class InputError : public Error {
public:
    using Error::Error;
};

/// File could not be opened or read.
class IoError : public InputError {
public:
    explicit IoError(std::string path)
        : InputError("cannot read '" + path + "'"), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Malformed scenario document.
class ParseError : public InputError {
public:
    using InputError::InputError;
};

/// A scenario invariant is violated; field() names the offending entry
/// using dotted notation ("sim.dt", "converters[1].l").
class ValidationError : public InputError {
public:
    ValidationError(std::string field, const std::string& why)
        : InputError(field + ": " + why), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A component names a profile, source or battery that does not exist.
class DanglingReference : public InputError {
public:
    DanglingReference(std::string name, const std::string& where)
        : InputError(where + ": reference to undefined '" + name + "'"),
          name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// ---------------------------------------------------------------------------
// Numerical errors
// ---------------------------------------------------------------------------

/// An iterative solver hit its iteration cap.
class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Transfer function evaluated on (or within 1e-15 of) a pole.
class PoleHit : public Error {
public:
    using Error::Error;
};

/// No positive proportional gain stabilises the loop.
class NoStableGain : public Error {
public:
    using Error::Error;
};

/// Simulation state left the representable/physical range (CLI exit code 3).
class NumericalBlowup : public Error {
public:
    NumericalBlowup(double time, std::string signal, double value)
        : Error("numerical blow-up at t=" + std::to_string(time) + " s in '" + signal +
                "' (value " + std::to_string(value) + ")"),
          time_(time), signal_(std::move(signal)) {}
    double time() const noexcept { return time_; }
    const std::string& signal() const noexcept { return signal_; }

private:
    double time_;
    std::string signal_;
};

} // namespace dcgrid
