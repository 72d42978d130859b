#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sparsereg/core.hpp"

namespace sparsereg {

// Whitespace/comma/semicolon-delimited numeric table; '#' starts a comment
// line. All rows must have the same number of fields; empty input or a
// ragged/non-numeric row is a DataError.
MatrixXd read_delimited_matrix(const std::string& path);

// Splits a data table into a regression problem. response_col is 1-based
// into the file's columns; 0 means the last column.
RegressionProblem problem_from_table(const MatrixXd& table, int response_col = 0);

// Writes to <path>.tmp then renames, so error paths never leave partial
// output behind.
void atomic_write_text(const std::string& path, const std::string& content);

// Stages every file, then renames; a failure while staging leaves no
// published output at all.
void atomic_write_set(const std::vector<std::pair<std::string, std::string>>& files);

}  // namespace sparsereg
