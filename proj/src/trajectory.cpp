#include "memswarm/trajectory.hpp"

#include "memswarm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace memswarm {

std::size_t Trajectory::column_index(std::string_view name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) {
        throw Error(ErrorCode::InvalidParameter, "no column named '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Trajectory::column(std::string_view name) const {
    const auto index = column_index(name);
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& row : rows) values.push_back(row[index]);
    return values;
}

std::string format_double(double value) {
    char buffer[64];
    auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

void write_csv(std::ostream& out, const Trajectory& trajectory) {
    for (std::size_t i = 0; i < trajectory.columns.size(); ++i) {
        if (i) out << ',';
        out << trajectory.columns[i];
    }
    out << '\n';
    for (const auto& row : trajectory.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
}

std::size_t step_count(double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw Error(ErrorCode::InvalidParameter, "time step must be positive");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw Error(ErrorCode::InvalidParameter, "end time must be non-negative");
    }
    // Tolerate t_end/dt landing a hair above an integer.
    return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace memswarm
