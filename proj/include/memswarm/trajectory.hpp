#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memswarm {

/// Time-indexed table. Column 0 is the index (time or ant count); the rest are
/// state or derived quantities in a fixed order.
struct Trajectory {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t size() const noexcept { return rows.size(); }
    std::size_t column_index(std::string_view name) const;
    std::vector<double> column(std::string_view name) const;
};

/// Shortest round-trip decimal form; identical inputs give identical bytes.
std::string format_double(double value);

void write_csv(std::ostream& out, const Trajectory& trajectory);

/// Number of fixed steps of size dt needed to reach t_end.
std::size_t step_count(double t_end, double dt);

}  // namespace memswarm
