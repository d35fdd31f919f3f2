#pragma once
#include <graphtopo/core.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace graphtopo::cli {

using Json = nlohmann::ordered_json;

/// Options shared by every estimator subcommand.
struct OutputOptions
{
    std::string output;    ///< primary output, stdout when empty
    std::string report;    ///< JSON diagnostics, skipped when empty
    std::string format = "csv";
    double weight_tol = default_weight_tol;
};

struct Command
{
    CLI::App* app = nullptr;
    std::function<void()> run;
};

void add_output_options(CLI::App& app, OutputOptions& out);

/// Reads an N x T signal file; `samples_in_rows` reads a T x N file instead.
SignalMatrix load_signals(const std::string& path, bool samples_in_rows);
Matrix load_matrix(const std::string& path, bool allow_missing = false);

/// Integers separated by commas, whitespace or newlines.
std::vector<Index> load_boundaries(const std::string& path);

/// One signal matrix per slot: either one file per slot, or a single file cut at the boundaries.
std::vector<SignalMatrix> load_slots(const std::vector<std::string>& inputs, const std::string& segments,
                                     bool samples_in_rows);

Json graph_json(const Graph& g, double weight_tol);
Json matrix_json(const Matrix& m);

void write_graph(const OutputOptions& out, const Graph& g);
void write_graphs(const OutputOptions& out, const std::vector<Graph>& graphs);
void write_text(const std::string& path, const std::string& text);

/// Every option of the subcommand with its resolved value.
Json parameters_json(const CLI::App& app);

/// Writes {command, n_nodes, parameters, diagnostics} to out.report.
void write_report(const OutputOptions& out, const CLI::App& app, Index n_nodes, Json diagnostics);

/**
 * Inserts "--key value" tokens from a JSON config object right after the
 * subcommand name. Keys already given on the command line are skipped, so
 * flags win. Arrays expand to repeated options; true becomes a bare flag.
 */
std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::vector<std::string>& subcommands);

std::vector<Command> register_commands(CLI::App& app);

} // namespace graphtopo::cli
