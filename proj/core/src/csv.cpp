#include "kslab/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace kslab {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& schema,
                     const std::vector<std::string>& columns)
    : out_(path), n_columns_(columns.size()) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    out_ << "# schema: " << schema << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_escape(columns[i]);
    }
    out_ << "\n";
}

void CsvWriter::write_row(const std::vector<std::string>& fields) {
    if (fields.size() != n_columns_) {
        throw std::invalid_argument("CsvWriter: row has " + std::to_string(fields.size()) +
                                    " fields, expected " + std::to_string(n_columns_));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_escape(fields[i]);
    }
    out_ << "\n";
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw std::runtime_error("CsvWriter: write failure on close");
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_matrix_csv: cannot open " + path);
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_matrix_csv: write failure on " + path);
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_matrix_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<double> row;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            row.push_back(std::stod(field));
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("read_matrix_csv: no data in " + path);
    const std::size_t cols = rows.front().size();
    Matrix m(static_cast<int>(rows.size()), static_cast<int>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            throw std::runtime_error("read_matrix_csv: ragged rows in " + path);
        }
        for (std::size_t j = 0; j < cols; ++j) m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
    return m;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace kslab
