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

#include "dcgrid/trace.hpp"

#include "dcgrid/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace dcgrid {

TraceLog::TraceLog(std::vector<std::string> names) : names_(std::move(names))
{
    if (names_.empty() || names_.front() != "t")
        throw std::invalid_argument("TraceLog: first column must be 't'");
}

void TraceLog::append(std::span<const double> row)
{
    if (row.size() != width())
        throw std::invalid_argument("TraceLog::append: row width mismatch");
    if (rows() > 0 && !(row[0] > at(rows() - 1, 0)))
        throw std::invalid_argument("TraceLog::append: time must be strictly increasing");
    data_.insert(data_.end(), row.begin(), row.end());
}

std::span<const double> TraceLog::row(std::size_t r) const
{
    return {data_.data() + r * width(), width()};
}

std::optional<std::size_t> TraceLog::index_of(std::string_view name) const
{
    for (std::size_t k = 0; k < names_.size(); ++k)
        if (names_[k] == name)
            return k;
    return std::nullopt;
}

std::vector<double> TraceLog::column(std::string_view name) const
{
    const auto idx = index_of(name);
    if (!idx)
        throw std::out_of_range("trace has no signal '" + std::string(name) + "'");
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r)
        out[r] = at(r, *idx);
    return out;
}

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

void write_csv(const TraceLog& trace, std::ostream& os)
{
    const auto& names = trace.names();
    for (std::size_t k = 0; k < names.size(); ++k)
        os << (k ? "," : "") << names[k];
    os << '\n';

    char buf[64];
    std::string line;
    for (std::size_t r = 0; r < trace.rows(); ++r) {
        line.clear();
        for (std::size_t k = 0; k < trace.width(); ++k) {
            if (k)
                line.push_back(',');
            const auto res = std::to_chars(buf, buf + sizeof buf, trace.at(r, k));
            line.append(buf, res.ptr);
        }
        line.push_back('\n');
        os << line;
    }
}

TraceLog read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw ParseError("trace csv: missing header");

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::size_t start = 0;
        for (;;) {
            const auto pos = s.find(',', start);
            out.push_back(s.substr(start, pos - start));
            if (pos == std::string::npos)
                break;
            start = pos + 1;
        }
        return out;
    };

    std::vector<std::string> names = split(line);
    if (names.empty() || names.front() != "t")
        throw ParseError("trace csv: first column must be 't'");
    TraceLog trace(names);

    std::vector<double> row(names.size());
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != names.size())
            throw ParseError("trace csv line " + std::to_string(lineno) + ": expected " +
                             std::to_string(names.size()) + " fields");
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const char* first = cells[k].data();
            const char* last = first + cells[k].size();
            const auto res = std::from_chars(first, last, row[k]);
            if (res.ec != std::errc() || res.ptr != last)
                throw ParseError("trace csv line " + std::to_string(lineno) + ": bad number '" + cells[k] +
                                 "'");
        }
        try {
            trace.append(row);
        } catch (const std::invalid_argument& e) {
            throw ParseError("trace csv line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return trace;
}

std::string events_to_json(const std::vector<TraceEvent>& events)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& ev : events) {
        nlohmann::ordered_json j;
        j["t"] = ev.t;
        j["component"] = ev.component;
        if (ev.kind == EventKind::ModeChange) {
            j["kind"] = "mode";
            j["from"] = mode_name(ev.from);
            j["to"] = mode_name(ev.to);
        } else {
            j["kind"] = "mppt";
            j["duty"] = ev.duty;
            j["power"] = ev.power;
            j["delta_p"] = ev.delta_p;
        }
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json doc;
    doc["events"] = std::move(arr);
    return doc.dump(2) + "\n";
}

} // namespace dcgrid
