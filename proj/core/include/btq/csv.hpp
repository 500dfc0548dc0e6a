// SPDX-License-Identifier: Apache-2.0
//
// Plain CSV reports. Lines starting with '#' are comments (timestamps and run
// parameters); the header row and the body are deterministic. Files are
// written to a temporary sibling and renamed into place.
#pragma once

#include <Eigen/Core>
#include <complex>
#include <filesystem>
#include <string>
#include <vector>

namespace btq {

struct CsvTable {
    std::vector<std::string> comments;  // without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_number(double value);
[[nodiscard]] double parse_number(const std::string& text);

/// Writes content to path via a temporary file and rename. Creates parent
/// directories. Throws Error{IoError}.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

[[nodiscard]] std::string to_csv_text(const CsvTable& table);
[[nodiscard]] CsvTable parse_csv_text(const std::string& text);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);

/// Row-major complex matrix: one CSV row per matrix row, columns re_0, im_0, re_1, im_1, ...
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXcd& matrix,
                      const std::vector<std::string>& comments = {});
[[nodiscard]] Eigen::MatrixXcd read_matrix_csv(const std::filesystem::path& path);

/// UTC timestamp for report headers, e.g. 2026-01-31T12:00:00Z.
[[nodiscard]] std::string utc_timestamp();

}  // namespace btq
