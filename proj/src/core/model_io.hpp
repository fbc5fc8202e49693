#pragma once

#include <iosfwd>
#include <string>

#include "core/forest.hpp"

namespace kardashev::model_io {

inline constexpr int kSchemaVersion = 1;

// Compact JSON: schema version, hyperparameters, feature names, OOB error and
// one set of flattened node arrays per tree. Output is byte-stable for a given
// model. `metadata_json` (a JSON object, may be empty) is embedded verbatim
// under "metadata".
void write_forest(std::ostream& out, const forest::ForestModel& model,
                  const std::string& metadata_json = "{}");
forest::ForestModel read_forest(std::istream& in);

void save_forest(const std::string& path, const forest::ForestModel& model,
                 const std::string& metadata_json = "{}");
forest::ForestModel load_forest(const std::string& path);

// Throws ModelIntegrityError unless every child index, feature id and cover
// total is consistent.
void check_integrity(const forest::ForestModel& model);

}  // namespace kardashev::model_io
