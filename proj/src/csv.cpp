#include <graphtopo/csv.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string_view>
#include <vector>

namespace graphtopo::io {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view cell, std::size_t line, bool allow_missing)
{
    cell = trim(cell);
    if (cell.empty()) {
        if (allow_missing) return std::numeric_limits<double>::quiet_NaN();
        throw InvalidInput("empty cell at line " + std::to_string(line));
    }
    double v = 0.0;
    const auto* begin = cell.data();
    const auto* end = cell.data() + cell.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw InvalidInput("malformed number '" + std::string(cell) + "' at line " + std::to_string(line));
    }
    if (!std::isfinite(v)) {
        throw InvalidInput("non-finite value at line " + std::to_string(line));
    }
    return v;
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    return out;
}

} // namespace

Matrix read_matrix(std::istream& in, const CsvOptions& options)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool skipped_header = !options.header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        std::vector<double> row;
        for (auto cell : split(line)) row.push_back(parse_cell(cell, line_no, options.allow_missing));
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InvalidInput("row length mismatch at line " + std::to_string(line_no));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) return Matrix(0, 0);
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return m;
}

Matrix read_matrix_file(const std::string& path, const CsvOptions& options)
{
    auto in = open_in(path);
    return read_matrix(in, options);
}

std::string format_double(double v)
{
    if (std::isnan(v)) return {};
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

void write_matrix(std::ostream& out, const Matrix& m)
{
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void write_matrix_file(const std::string& path, const Matrix& m)
{
    auto out = open_out(path);
    write_matrix(out, m);
}

void write_edge_list(std::ostream& out, const Graph& g, double weight_tol)
{
    const Index n = g.n_nodes();
    const Matrix& w = g.weights();
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i == j || (!g.is_directed() && j < i)) continue;
            if (std::abs(w(i, j)) <= weight_tol) continue;
            out << (i + 1) << ',' << (j + 1) << ',' << format_double(w(i, j)) << '\n';
        }
    }
}

void write_edge_list_file(const std::string& path, const Graph& g, double weight_tol)
{
    auto out = open_out(path);
    write_edge_list(out, g, weight_tol);
}

Graph read_edge_list(std::istream& in, Index n_nodes, bool directed)
{
    Matrix w = Matrix::Zero(n_nodes, n_nodes);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != 3) throw InvalidInput("edge list needs 3 columns at line " + std::to_string(line_no));
        const double fi = parse_cell(cells[0], line_no, false);
        const double fj = parse_cell(cells[1], line_no, false);
        const double v = parse_cell(cells[2], line_no, false);
        const auto i = static_cast<Index>(fi) - 1;
        const auto j = static_cast<Index>(fj) - 1;
        if (fi != std::floor(fi) || fj != std::floor(fj) || i < 0 || j < 0 || i >= n_nodes || j >= n_nodes || i == j) {
            throw InvalidInput("bad node index at line " + std::to_string(line_no));
        }
        w(i, j) = v;
        if (!directed) w(j, i) = v;
    }
    return Graph(std::move(w), directed);
}

Graph read_edge_list_file(const std::string& path, Index n_nodes, bool directed)
{
    auto in = open_in(path);
    return read_edge_list(in, n_nodes, directed);
}

} // namespace graphtopo::io
