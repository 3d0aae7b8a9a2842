#pragma once

#include <string>

#include "mixnet/csv.hpp"
#include "mixnet/pipeline.hpp"
#include "mixnet/run_config.hpp"

namespace mixnet {

// A saved fit: everything later commands (summary, stability, scores,
// export) need, without re-running any estimation. Numeric fields use
// shortest round-trip decimals, so load(save(a)) is bit-exact; archives
// contain no timestamps or machine identifiers, so identical runs produce
// identical bytes.
struct Archive {
  static constexpr int kVersion = 1;

  FitResult fit;
  RunConfig config;      // full run configuration echo
  bool has_data = false; // raw training data, kept when save_data was set
  RawTable data;
};

std::string archive_to_json(const Archive& a);

// Rejects other formats and versions; every structural problem is a
// DataError naming the missing or malformed field.
Archive archive_from_json(const std::string& text);

void save_archive(const Archive& a, const std::string& path);
Archive load_archive(const std::string& path);

}  // namespace mixnet
