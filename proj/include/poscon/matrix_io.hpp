#pragma once

#include <poscon/types.hpp>

#include <json.hpp>

#include <filesystem>
#include <iosfwd>

namespace poscon {

using Json = nlohmann::json;

/// Parse { "rows": n, "cols": n, "entries": [[re, im] | re, ...] } row-major.
ComplexMatrix matrix_from_json(const Json& doc);

Json matrix_to_json(const ComplexMatrix& m);

/// CSV of real entries, one row per line.
ComplexMatrix matrix_from_csv(std::istream& in);

/// Dispatch on content: JSON documents start with '{', anything else is CSV.
ComplexMatrix load_matrix(const std::filesystem::path& path);

void save_matrix(const ComplexMatrix& m, const std::filesystem::path& path);

}  // namespace poscon
