#include "sparsereg/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "sparsereg/errors.hpp"

namespace sparsereg {

MatrixXd read_delimited_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& ch : line) {
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    }
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        row.push_back(v);
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) + ": not a number: '" + tok + "'");
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(rows.front().size()) + " fields, got " +
                      std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no rows");
  MatrixXd out(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

RegressionProblem problem_from_table(const MatrixXd& table, int response_col) {
  const int cols = static_cast<int>(table.cols());
  if (cols < 2) throw DataError("data table needs at least 2 columns (regressors + response)");
  int yc = response_col == 0 ? cols : response_col;
  if (yc < 1 || yc > cols) throw DataError("response column out of range");
  --yc;
  MatrixXd x(table.rows(), cols - 1);
  int out = 0;
  for (int j = 0; j < cols; ++j) {
    if (j == yc) continue;
    x.col(out++) = table.col(j);
  }
  return RegressionProblem::from_raw(std::move(x), table.col(yc));
}

void atomic_write_text(const std::string& path, const std::string& content) {
  atomic_write_set({{path, content}});
}

void atomic_write_set(const std::vector<std::pair<std::string, std::string>>& files) {
  std::vector<std::string> staged;
  auto cleanup = [&] {
    for (const auto& tmp : staged) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
    }
  };
  for (const auto& [path, content] : files) {
    const std::string tmp = path + ".tmp";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      cleanup();
      throw DataError("cannot write: " + tmp);
    }
    out << content;
    out.close();
    if (!out.good()) {
      cleanup();
      throw DataError("write failed: " + tmp);
    }
    staged.push_back(tmp);
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    std::filesystem::rename(staged[i], files[i].first, ec);
    if (ec) {
      cleanup();
      throw DataError("cannot move output into place: " + files[i].first + " (" +
                      ec.message() + ")");
    }
  }
}

}  // namespace sparsereg
