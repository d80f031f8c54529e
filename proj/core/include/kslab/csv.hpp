#pragma once

#include "kslab/matrix.hpp"

#include <fstream>
#include <string>
#include <vector>

namespace kslab {

/// Round-trippable decimal rendering (%.17g), shared by all writers so that
/// reruns with identical seeds produce byte-identical files.
std::string format_double(double x);

/// RFC-4180-style field quoting; only quotes when the field needs it.
std::string csv_escape(const std::string& field);

/// Tabular CSV with a schema comment as the first line, then a header row.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& schema,
              const std::vector<std::string>& columns);

    void write_row(const std::vector<std::string>& fields);
    void close();

private:
    std::ofstream out_;
    std::size_t n_columns_;
};

void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(const std::string& path);

/// Whole-file read helper used by determinism checks and loaders.
std::string read_file(const std::string& path);

}  // namespace kslab
