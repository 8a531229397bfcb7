#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "sgfv/mesh.hpp"

namespace sgfv {

/// Comma-separated writer; the header row is written on construction.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

/// Cell-center coordinates followed by one column per species.
void write_snapshot(const std::filesystem::path& path, const Mesh& mesh, std::span<const Field> u);

}  // namespace sgfv
