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

#include "dcgrid/converters.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcgrid {

enum class EventKind { ModeChange, MpptUpdate };

struct TraceEvent {
    double t = 0.0;
    EventKind kind = EventKind::ModeChange;
    std::string component;
    // ModeChange
    Mode from = Mode::Idle;
    Mode to = Mode::Idle;
    // MpptUpdate
    double duty = 0.0;
    double power = 0.0;
    double delta_p = 0.0;
};

/// Decimated time series of named signals plus discrete events. Column 0 is
/// always "t" and is strictly increasing.
class TraceLog {
public:
    TraceLog() = default;
    explicit TraceLog(std::vector<std::string> names);

    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t width() const noexcept { return names_.size(); }
    std::size_t rows() const noexcept { return width() ? data_.size() / width() : 0; }

    /// Appends one sample; row.size() must equal width() and row[0] must
    /// exceed the previous time.
    void append(std::span<const double> row);

    std::span<const double> row(std::size_t r) const;
    double at(std::size_t r, std::size_t col) const { return data_[r * width() + col]; }

    std::optional<std::size_t> index_of(std::string_view name) const;
    /// Throws std::out_of_range for an unknown signal.
    std::vector<double> column(std::string_view name) const;

    std::vector<TraceEvent> events;

private:
    std::vector<std::string> names_;
    std::vector<double> data_;
};

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

/// Header row then one line per sample, comma separated, '\n' line ends.
void write_csv(const TraceLog& trace, std::ostream& os);

/// Inverse of write_csv (events are not part of the CSV). Throws ParseError.
TraceLog read_csv(std::istream& is);

/// Sidecar document: {"events": [...]}.
std::string events_to_json(const std::vector<TraceEvent>& events);

} // namespace dcgrid
