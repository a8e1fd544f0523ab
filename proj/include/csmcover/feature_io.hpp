#ifndef CSMCOVER_FEATURE_IO_HPP
#define CSMCOVER_FEATURE_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "csmcover/detector.hpp"

namespace csmcover {

// Feature files: CSV with header `source_id,split,label,f0,...,f{D-1}`,
// split in {train,test}, label in {cover,stego}. Rows of several sources may
// share one file.

std::string features_to_csv(const std::vector<SourceDataset>& datasets);
/// `origin` names the input in error messages.
std::vector<SourceDataset> features_from_csv(const std::string& text, const std::string& origin = "<features>");

void save_feature_file(const std::vector<SourceDataset>& datasets, const std::filesystem::path& path);

/// Reads one CSV file, or every *.csv in a directory (name order). Returns
/// datasets sorted by source id, each validated.
std::vector<SourceDataset> load_feature_files(const std::filesystem::path& path);

// Regret matrix files: CSV whose first row and column list source ids and
// whose cells are fractions, plus a JSON sidecar next to it (same stem,
// .json) with intrinsic difficulties and provenance.

std::string regret_to_csv(const RegretMatrix& m);
RegretMatrix regret_from_csv(const std::string& text, const std::string& origin = "<regret>");

nlohmann::ordered_json regret_sidecar(const RegretMatrix& m, const nlohmann::ordered_json& provenance);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

void save_regret_matrix(const RegretMatrix& m, const std::filesystem::path& csv_path,
                        const nlohmann::ordered_json& provenance);

/// Loads the CSV and, when present, its sidecar. Without a sidecar the
/// intrinsic difficulties stay empty.
RegretMatrix load_regret_matrix(const std::filesystem::path& csv_path);

}  // namespace csmcover

#endif
