#include "sgfv/harness/csv.hpp"

#include "sgfv/error.hpp"
#include "sgfv/format.hpp"

namespace sgfv {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw UsageError("csv: row has the wrong number of columns");
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (c) out_ << ',';
    out_ << cells[c];
  }
  out_ << '\n';
}

void write_snapshot(const std::filesystem::path& path, const Mesh& mesh, std::span<const Field> u) {
  std::vector<std::string> header;
  static const char* axes[] = {"x", "y", "z"};
  for (int a = 0; a < mesh.dim(); ++a) header.emplace_back(a < 3 ? axes[a] : "x" + std::to_string(a + 1));
  for (std::size_t i = 0; i < u.size(); ++i) header.push_back("u" + std::to_string(i + 1));
  CsvWriter w(path, header);
  std::vector<std::string> row(header.size());
  for (CellIndex k = 0; k < mesh.num_cells(); ++k) {
    for (int a = 0; a < mesh.dim(); ++a) row[static_cast<std::size_t>(a)] = format_real(mesh.center(k, a));
    for (std::size_t i = 0; i < u.size(); ++i) row[static_cast<std::size_t>(mesh.dim()) + i] = format_real(u[i][k]);
    w.row(row);
  }
}

}  // namespace sgfv
