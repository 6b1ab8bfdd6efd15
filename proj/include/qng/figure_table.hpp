#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "qng/errors.hpp"

namespace qng {

/// Format a double with 17 significant digits ('.' decimal, no locale), so
/// a CSV round-trip is lossless.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Named columns of equal length plus free-form metadata; the CLI emits
/// these as CSV or JSON.
struct FigureTable {
    std::vector<std::pair<std::string, std::vector<double>>> columns;
    std::map<std::string, std::string> metadata;

    void validate() const {
        if (columns.empty()) throw invalid_input("table has no columns");
        const std::size_t rows = columns.front().second.size();
        for (const auto& [name, values] : columns) {
            if (values.size() != rows)
                throw invalid_input("column length mismatch: " + name);
            for (double v : values)
                if (!std::isfinite(v))
                    throw invalid_input("non-finite value in column " + name);
        }
    }

    void write_csv(std::ostream& os) const {
        validate();
        for (const auto& [key, value] : metadata)
            os << "# " << key << " = " << value << "\n";
        for (std::size_t c = 0; c < columns.size(); ++c)
            os << (c ? "," : "") << columns[c].first;
        os << "\n";
        const std::size_t rows = columns.front().second.size();
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < columns.size(); ++c)
                os << (c ? "," : "") << format_double(columns[c].second[r]);
            os << "\n";
        }
    }
};

}  // namespace qng
