#pragma once

#include <filesystem>
#include <string>

#include "factorcount/panel.hpp"

namespace fc {

// Parse a rectangular numeric CSV into a panel (rows = series, columns = time
// points).  A leading row/column whose cells are not all numeric is treated
// as time/series labels.  Missing or non-numeric body cells are input errors
// that name the offending row and column.
PanelData ingest_csv(const std::filesystem::path& path);

// Write a panel back to CSV (labels included when present), with full double
// round-trip precision and a period decimal separator.
void write_csv(const PanelData& panel, const std::filesystem::path& path);

}  // namespace fc
