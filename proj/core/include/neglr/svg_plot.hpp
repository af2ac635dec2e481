#pragma once

#include <string>

#include "neglr/csv.hpp"

namespace neglr {

struct PlotOptions {
    int width = 720;
    int height = 440;
    std::string title;
};

/// SVG 1.1 line chart of the first column (x) against every other column,
/// one <path> per data column. Output depends only on the input.
/// Throws ParseError on tables without rows, with fewer than two columns,
/// or with non-numeric cells.
std::string render_svg(const CsvTable& table, const PlotOptions& options = {});

}  // namespace neglr
