#include "cli.hpp"

#include <graphtopo/csv.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace graphtopo::cli {

void add_output_options(CLI::App& app, OutputOptions& out)
{
    app.add_option("--output", out.output, "Primary output file (stdout when omitted)");
    app.add_option("--report", out.report, "JSON diagnostics file");
    app.add_option("--format", out.format, "Primary output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--weight-tol", out.weight_tol, "Weights at or below this magnitude are not written")
        ->check(CLI::NonNegativeNumber);
}

Matrix load_matrix(const std::string& path, bool allow_missing)
{
    Matrix m = io::read_matrix_file(path, {.header = false, .allow_missing = allow_missing});
    if (m.size() == 0) throw EmptyInput("'" + path + "' holds no data");
    return m;
}

SignalMatrix load_signals(const std::string& path, bool samples_in_rows)
{
    Matrix m = load_matrix(path);
    if (samples_in_rows) m.transposeInPlace();
    return SignalMatrix(std::move(m));
}

std::vector<Index> load_boundaries(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::replace(text.begin(), text.end(), ',', ' ');
    std::istringstream tokens(text);
    std::vector<Index> out;
    std::string tok;
    while (tokens >> tok) {
        long v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) {
            throw InvalidInput("segment boundary '" + tok + "' is not an integer");
        }
        out.push_back(static_cast<Index>(v));
    }
    return out;
}

std::vector<SignalMatrix> load_slots(const std::vector<std::string>& inputs, const std::string& segments,
                                     bool samples_in_rows)
{
    std::vector<SignalMatrix> slots;
    if (segments.empty()) {
        for (const auto& path : inputs) slots.push_back(load_signals(path, samples_in_rows));
        return slots;
    }
    if (inputs.size() != 1) throw ParamError("--segments needs exactly one --input");
    const SignalMatrix y = load_signals(inputs.front(), samples_in_rows);
    const auto b = load_boundaries(segments);
    if (b.size() < 2 || b.front() != 0 || b.back() != y.n_samples()) {
        throw ParamError("segment boundaries must start at 0 and end at T");
    }
    for (std::size_t m = 0; m + 1 < b.size(); ++m) {
        if (b[m + 1] <= b[m]) throw EmptySlot("segment " + std::to_string(m) + " is empty");
        slots.emplace_back(Matrix(y.data().middleCols(b[m], b[m + 1] - b[m])));
    }
    return slots;
}

Json graph_json(const Graph& g, double weight_tol)
{
    Json edges = Json::array();
    const Matrix& w = g.weights();
    for (Index i = 0; i < g.n_nodes(); ++i) {
        for (Index j = 0; j < g.n_nodes(); ++j) {
            if (i == j || (!g.is_directed() && j < i) || std::abs(w(i, j)) <= weight_tol) continue;
            edges.push_back({{"i", i + 1}, {"j", j + 1}, {"weight", w(i, j)}});
        }
    }
    return {{"n_nodes", g.n_nodes()}, {"directed", g.is_directed()}, {"edges", std::move(edges)}};
}

Json matrix_json(const Matrix& m)
{
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << text;
}

void write_graph(const OutputOptions& out, const Graph& g)
{
    if (out.format == "json") {
        write_text(out.output, graph_json(g, out.weight_tol).dump(2) + "\n");
        return;
    }
    std::ostringstream os;
    io::write_edge_list(os, g, out.weight_tol);
    write_text(out.output, os.str());
}

void write_graphs(const OutputOptions& out, const std::vector<Graph>& graphs)
{
    if (out.format == "json") {
        Json all = Json::array();
        for (const auto& g : graphs) all.push_back(graph_json(g, out.weight_tol));
        write_text(out.output, Json{{"graphs", std::move(all)}}.dump(2) + "\n");
        return;
    }
    std::ostringstream os;
    for (std::size_t t = 0; t < graphs.size(); ++t) {
        std::ostringstream one;
        io::write_edge_list(one, graphs[t], out.weight_tol);
        std::istringstream lines(one.str());
        std::string line;
        while (std::getline(lines, line)) os << (t + 1) << ',' << line << '\n';
    }
    write_text(out.output, os.str());
}

namespace {

Json scalar(const std::string& s)
{
    long long i = 0;
    const auto [iptr, iec] = std::from_chars(s.data(), s.data() + s.size(), i);
    if (!s.empty() && iec == std::errc() && iptr == s.data() + s.size()) return i;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (!s.empty() && ec == std::errc() && ptr == s.data() + s.size()) return v;
    return s;
}

} // namespace

Json parameters_json(const CLI::App& app)
{
    Json params = Json::object();
    for (const CLI::Option* opt : app.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config") continue;
        if (opt->get_type_name().empty()) {
            params[name] = opt->count() > 0;
            continue;
        }
        const auto& res = opt->results();
        if (opt->get_expected_max() > 1) {
            Json arr = Json::array();
            for (const auto& r : res) arr.push_back(scalar(r));
            params[name] = std::move(arr);
        } else if (!res.empty()) {
            params[name] = scalar(res.back());
        } else if (!opt->get_default_str().empty()) {
            params[name] = scalar(opt->get_default_str());
        } else {
            params[name] = nullptr;
        }
    }
    return params;
}

void write_report(const OutputOptions& out, const CLI::App& app, Index n_nodes, Json diagnostics)
{
    if (out.report.empty()) return;
    Json doc = {{"command", app.get_name()},
                {"n_nodes", n_nodes},
                {"parameters", parameters_json(app)},
                {"diagnostics", std::move(diagnostics)}};
    std::ofstream f(out.report);
    if (!f) throw InvalidInput("cannot write '" + out.report + "'");
    f << doc.dump(2) << '\n';
}

std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::vector<std::string>& subcommands)
{
    std::string path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
        else if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open config '" + path + "'");
    Json cfg;
    try {
        cfg = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidInput("config '" + path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw InvalidInput("config must be a JSON object");

    auto given = [&](const std::string& key) {
        const std::string flag = "--" + key;
        return std::any_of(args.begin(), args.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    auto text = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };

    std::vector<std::string> tokens;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "config" || given(key)) continue;
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>()) tokens.push_back(flag);
        } else if (value.is_array()) {
            for (const auto& item : value) {
                tokens.push_back(flag);
                tokens.push_back(text(item));
            }
        } else if (value.is_null() || value.is_object()) {
            throw InvalidInput("config value for '" + key + "' must be a scalar or an array");
        } else {
            tokens.push_back(flag);
            tokens.push_back(text(value));
        }
    }

    auto pos = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
        return std::find(subcommands.begin(), subcommands.end(), a) != subcommands.end();
    });
    std::vector<std::string> merged(args.begin(), pos == args.end() ? pos : pos + 1);
    merged.insert(merged.end(), tokens.begin(), tokens.end());
    if (pos != args.end()) merged.insert(merged.end(), pos + 1, args.end());
    return merged;
}

} // namespace graphtopo::cli
