#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>

#include "xqs/distributions.hpp"

namespace xqs {

struct IngestResult {
  Sample values;
  /// Empty, non-numeric and NaN fields.
  std::size_t dropped_invalid = 0;
  std::size_t dropped_zero = 0;
};

/// Read a single-column CSV, or the `value` column of a headered one.
/// Throws IoError if unreadable, EmptyDataError if no usable rows remain.
IngestResult ingest_csv(const std::filesystem::path& path, bool zero_filter);

/// Same, from in-memory text.
IngestResult ingest_csv_text(std::string_view text, bool zero_filter);

}  // namespace xqs
