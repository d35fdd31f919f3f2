#pragma once
#include <graphtopo/core.hpp>
#include <iosfwd>
#include <string>

namespace graphtopo::io {

struct CsvOptions
{
    bool header = false;
    /// Empty cells become NaN instead of raising InvalidInput.
    bool allow_missing = false;
};

/// Parses a numeric CSV (rows = nodes, columns = samples).
/// Ragged rows raise InvalidInput("row length mismatch at line k").
Matrix read_matrix(std::istream& in, const CsvOptions& options = {});
Matrix read_matrix_file(const std::string& path, const CsvOptions& options = {});

/// Writes values with 17 significant digits; NaN is written as an empty cell.
void write_matrix(std::ostream& out, const Matrix& m);
void write_matrix_file(const std::string& path, const Matrix& m);

/// "i,j,weight" lines, 1-indexed. Undirected graphs list i < j only;
/// directed graphs list every nonzero W(i, j), i.e. the edge j -> i.
void write_edge_list(std::ostream& out, const Graph& g, double weight_tol = default_weight_tol);
void write_edge_list_file(const std::string& path, const Graph& g, double weight_tol = default_weight_tol);

Graph read_edge_list(std::istream& in, Index n_nodes, bool directed);
Graph read_edge_list_file(const std::string& path, Index n_nodes, bool directed);

/// Shortest decimal form that round-trips at 17 significant digits.
std::string format_double(double v);

} // namespace graphtopo::io
