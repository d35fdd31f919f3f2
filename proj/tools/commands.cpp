#include "cli.hpp"

#include <graphtopo/csv.hpp>
#include <graphtopo/dynjd.hpp>
#include <graphtopo/jisg.hpp>
#include <graphtopo/ksvarm.hpp>

#include <algorithm>
#include <cmath>
#include <memory>

namespace graphtopo::cli {

namespace {

Json trace_json(const std::vector<double>& v) { return Json(v); }

// Signal-file options shared by the single-input estimators.
struct SignalInput
{
    std::string input;
    bool samples_in_rows = false;

    void add(CLI::App& app)
    {
        app.add_option("--input", input, "Signal CSV, one row per node")->required()->check(CLI::ExistingFile);
        app.add_flag("--samples-in-rows", samples_in_rows, "Input has one row per sample instead");
    }
    SignalMatrix load() const { return load_signals(input, samples_in_rows); }
};

// Several slots given as one file per slot or a single file cut by --segments.
struct SlotInput
{
    std::vector<std::string> inputs;
    std::string segments;
    bool samples_in_rows = false;

    void add(CLI::App& app, const std::string& what)
    {
        app.add_option("--input", inputs, what)->required()->check(CLI::ExistingFile);
        app.add_option("--segments", segments, "Boundary file cutting a single input into slots")
            ->check(CLI::ExistingFile);
        app.add_flag("--samples-in-rows", samples_in_rows, "Inputs have one row per sample instead");
    }
    std::vector<SignalMatrix> load() const
    {
        auto slots = load_slots(inputs, segments, samples_in_rows);
        for (const auto& s : slots) {
            if (s.n_nodes() != slots.front().n_nodes()) throw ShapeError("all slots must share the node count");
        }
        return slots;
    }
};

Command corr_command(CLI::App& root)
{
    struct State
    {
        SignalInput in;
        OutputOptions out;
        double q = 0.1;
        std::string weights = "binary";
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("corr", "Correlation network with Benjamini-Hochberg edge selection");
    s->in.add(*app);
    app->add_option("--q", s->q, "False discovery rate level")->check(CLI::Range(0.0, 1.0));
    app->add_option("--weights", s->weights, "Edge weights")->check(CLI::IsMember({"binary", "rho"}));
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const SignalMatrix y = s->in.load();
                const Matrix rho = corrnet::pearson_matrix(corrnet::sample_covariance(y));
                const auto tests = corrnet::fisher_tests(rho, y.n_samples());
                std::vector<double> p;
                for (const auto& t : tests) p.push_back(t.p_value);
                const auto k = corrnet::bh_rejections(p, s->q);
                const Graph g = corrnet::bh_fdr_select(
                    tests, s->q, s->weights == "rho" ? corrnet::EdgeWeights::rho : corrnet::EdgeWeights::binary);
                write_graph(s->out, g);
                write_report(s->out, *app, y.n_nodes(),
                             {{"n_tests", tests.size()}, {"n_rejections", k}, {"correlations", matrix_json(rho)}});
            }};
}

Command glasso_command(CLI::App& root)
{
    struct State
    {
        SignalInput in;
        OutputOptions out;
        double lambda = -1.0;
        bool laplacian = false;
        bool unpenalized_diagonal = false;
        double tol = 1e-6;
        Index max_iter = 1000;
        std::string precision;
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("glasso", "Sparse precision estimation (graphical lasso or Laplacian GMRF)");
    s->in.add(*app);
    app->add_option("--lambda", s->lambda, "l1 weight; negative selects 2 sqrt(log N / T)");
    app->add_flag("--laplacian", s->laplacian, "Constrain the precision to a loaded Laplacian");
    app->add_flag("--unpenalized-diagonal", s->unpenalized_diagonal, "Leave the diagonal out of the l1 term");
    app->add_option("--tol", s->tol)->check(CLI::PositiveNumber);
    app->add_option("--max-iter", s->max_iter)->check(CLI::PositiveNumber);
    app->add_option("--precision", s->precision, "Also write the precision matrix as CSV");
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const SignalMatrix y = s->in.load();
                const auto c = corrnet::sample_covariance(y);
                const double lambda = s->lambda < 0.0 ? gmrf::default_lambda(y.n_nodes(), y.n_samples()) : s->lambda;
                Matrix theta;
                Json diag;
                if (s->laplacian) {
                    const auto est = gmrf::laplacian_gmrf(
                        c, lambda, {.tol = s->tol, .max_iter = std::max<Index>(s->max_iter, 1),
                                    .penalize_diagonal = !s->unpenalized_diagonal});
                    theta = est.precision();
                    diag = {{"loading", est.loading},   {"converged", est.converged},
                            {"iterations", est.iterations}, {"residual", est.residual},
                            {"objective_trace", trace_json(est.objective_trace)}};
                } else {
                    const auto est = gmrf::graphical_lasso(
                        c, lambda, {.tol = s->tol, .max_iter = s->max_iter, .penalize_diagonal = !s->unpenalized_diagonal});
                    theta = est.theta;
                    diag = {{"converged", est.converged},
                            {"iterations", est.iterations},
                            {"kkt_residual", est.kkt_residual},
                            {"objective_trace", trace_json(est.objective_trace)}};
                }
                diag["lambda"] = lambda;
                if (!s->precision.empty()) io::write_matrix_file(s->precision, theta);
                write_graph(s->out, gmrf::precision_support(theta, s->out.weight_tol));
                write_report(s->out, *app, y.n_nodes(), std::move(diag));
            }};
}

Command smooth_command(CLI::App& root)
{
    struct State
    {
        SignalInput in;
        OutputOptions out;
        double alpha = 1.0;
        double beta = 1.0;
        double tol = 1e-8;
        Index max_iter = 100000;
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("smooth-learn", "Graph learning from smooth signals");
    s->in.add(*app);
    app->add_option("--alpha", s->alpha, "Log-degree barrier weight")->check(CLI::PositiveNumber);
    app->add_option("--beta", s->beta, "Squared-weight penalty")->check(CLI::PositiveNumber);
    app->add_option("--tol", s->tol)->check(CLI::PositiveNumber);
    app->add_option("--max-iter", s->max_iter)->check(CLI::PositiveNumber);
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const SignalMatrix y = s->in.load();
                smoothlearn::SmoothLearnOptions opts;
                opts.tol = s->tol;
                opts.max_iter = s->max_iter;
                const auto res = smoothlearn::learn_graph(smoothlearn::distance_vector(y), s->alpha, s->beta, opts);
                write_graph(s->out, graph_from_edge_vector(res.w));
                write_report(s->out, *app, y.n_nodes(),
                             {{"primal_objective", res.primal_obj},
                              {"dual_objective", res.dual_obj},
                              {"iterations", res.iterations},
                              {"converged", res.converged}});
            }};
}

Command disc_command(CLI::App& root)
{
    struct State
    {
        SlotInput in;
        OutputOptions out;
        double alpha = 1.0;
        double beta = 1.0;
        double gamma = 0.0;
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("disc-learn", "Discriminative graphs, one per class");
    s->in.add(*app, "Signal CSV of one class (repeat per class)");
    app->add_option("--alpha", s->alpha)->check(CLI::PositiveNumber);
    app->add_option("--beta", s->beta)->check(CLI::PositiveNumber);
    app->add_option("--gamma", s->gamma, "Weight of the other classes' smoothness")->check(CLI::NonNegativeNumber);
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const auto classes = s->in.load();
                std::vector<smoothlearn::DistanceVector> e;
                for (const auto& y : classes) e.push_back(smoothlearn::distance_vector(y));
                const auto graphs = smoothlearn::learn_discriminative_graphs(e, s->alpha, s->beta, s->gamma);
                write_graphs(s->out, graphs);
                write_report(s->out, *app, classes.front().n_nodes(), {{"n_classes", graphs.size()}});
            }};
}

Command sem_command(CLI::App& root)
{
    struct State
    {
        SignalInput in;
        OutputOptions out;
        std::string exog;
        double alpha = 0.1;
        double tol = 1e-11;
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("sem", "Sparse structural equation model with exogenous inputs");
    s->in.add(*app);
    app->add_option("--exog", s->exog, "Exogenous input CSV, same shape as the signals")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--alpha", s->alpha, "l1 weight")->check(CLI::NonNegativeNumber);
    app->add_option("--tol", s->tol)->check(CLI::PositiveNumber);
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const SignalMatrix y = s->in.load();
                Matrix x = load_matrix(s->exog);
                if (s->in.samples_in_rows) x.transposeInPlace();
                const auto res = semdag::sem_fit(y, x, s->alpha, {.tol = s->tol});
                write_graph(s->out, Graph::directed(res.model.w));
                write_report(s->out, *app, y.n_nodes(),
                             {{"b", std::vector<double>(res.model.b.begin(), res.model.b.end())},
                              {"iterations", res.iterations},
                              {"converged", res.converged},
                              {"input_rank", res.input_rank},
                              {"objective_trace", trace_json(res.objective_trace)}});
            }};
}

Command dag_command(CLI::App& root)
{
    struct State
    {
        SignalInput in;
        OutputOptions out;
        semdag::DagOptions opts;
        std::string kind = "expm";
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("dag", "Continuous DAG learning with an acyclicity constraint");
    s->in.add(*app);
    app->add_option("--acyclicity", s->kind)->check(CLI::IsMember({"expm", "poly", "ldet"}));
    app->add_option("--l1", s->opts.l1)->check(CLI::NonNegativeNumber);
    app->add_option("--ldet-s", s->opts.ldet_s, "s of the log-det function")->check(CLI::PositiveNumber);
    app->add_option("--h-tol", s->opts.h_tol)->check(CLI::PositiveNumber);
    app->add_option("--threshold", s->opts.w_threshold, "Final weight threshold")->check(CLI::NonNegativeNumber);
    app->add_option("--max-outer", s->opts.max_outer)->check(CLI::PositiveNumber);
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const SignalMatrix y = s->in.load();
                auto opts = s->opts;
                opts.kind = s->kind == "poly"   ? semdag::AcyclicityKind::poly
                            : s->kind == "ldet" ? semdag::AcyclicityKind::ldet
                                                : semdag::AcyclicityKind::expm;
                const auto res = semdag::dag_fit(y, opts);
                write_graph(s->out, Graph::directed(res.w));
                write_report(s->out, *app, y.n_nodes(),
                             {{"h_value", res.h_value},
                              {"h_trace", trace_json(res.h_trace)},
                              {"outer_iterations", res.outer_iterations},
                              {"rho", res.rho},
                              {"h_converged", res.h_converged},
                              {"is_dag", res.is_dag}});
            }};
}

Command varm_command(CLI::App& root)
{
    struct State
    {
        SignalInput in;
        OutputOptions out;
        Index order = 1;
        Index max_order = 0;
        double lambda = -1.0;
        double lambda_ratio = 0.1;
        std::string rule = "any";
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("varm", "Sparse vector autoregression network");
    s->in.add(*app);
    app->add_option("--order", s->order, "Lag order")->check(CLI::PositiveNumber);
    app->add_option("--select-order", s->max_order, "Pick the order up to this value by BIC (overrides --order)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--lambda", s->lambda, "l1 weight; negative uses --lambda-ratio");
    app->add_option("--lambda-ratio", s->lambda_ratio, "l1 weight as a fraction of the all-zero threshold")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--rule", s->rule, "Edge if any lag or all lags are nonzero")->check(CLI::IsMember({"any", "all"}));
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const SignalMatrix y = s->in.load();
                Json diag = Json::object();
                Index order = s->order;
                if (s->max_order > 0) {
                    const double lam = s->lambda >= 0.0 ? s->lambda
                                                        : s->lambda_ratio * semdag::varm_lambda_max(y, 1);
                    Json scores = Json::array();
                    for (const auto& sc : semdag::varm_order_scores(y, s->max_order, lam)) {
                        scores.push_back({{"order", sc.order}, {"bic", sc.bic}});
                    }
                    order = semdag::select_varm_order(y, s->max_order, lam);
                    diag["order_scores"] = std::move(scores);
                }
                const double lambda = s->lambda >= 0.0 ? s->lambda : s->lambda_ratio * semdag::varm_lambda_max(y, order);
                const auto res = semdag::varm_fit(y, order, lambda);
                write_graph(s->out, semdag::varm_graph(res.model,
                                                       s->rule == "all" ? semdag::EdgeRule::all_lags
                                                                        : semdag::EdgeRule::any_lag,
                                                       s->out.weight_tol));
                Json lags = Json::array();
                for (const auto& a : res.model.lags) lags.push_back(matrix_json(a));
                diag["order"] = order;
                diag["lambda"] = lambda;
                diag["lags"] = std::move(lags);
                diag["iterations"] = res.iterations;
                diag["converged"] = res.converged;
                diag["objective_trace"] = trace_json(res.objective_trace);
                write_report(s->out, *app, y.n_nodes(), std::move(diag));
            }};
}

Command ksvarm_command(CLI::App& root)
{
    struct State
    {
        SignalInput in;
        OutputOptions out;
        Index order = 1;
        std::string kernels = "linear,gaussian";
        double lambda = -1.0;
        double lambda_ratio = 0.5;
        bool lagged_only = false;
        bool mkl = false;
        double tol = 1e-9;
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("ksvarm", "Kernel-based structural VAR network with group sparsity");
    s->in.add(*app);
    app->add_option("--order", s->order, "Lag order")->check(CLI::PositiveNumber);
    app->add_option("--kernels", s->kernels, "Kernel dictionary, e.g. linear,gaussian:0.5,polynomial:2");
    app->add_option("--lambda", s->lambda, "Group weight; negative uses --lambda-ratio");
    app->add_option("--lambda-ratio", s->lambda_ratio, "Group weight as a fraction of the all-zero threshold")
        ->check(CLI::Range(0.0, 1.0));
    app->add_flag("--lagged-only", s->lagged_only, "Drop the instantaneous (lag 0) terms");
    app->add_flag("--mkl", s->mkl, "Multiple-kernel variant with one group per kernel");
    app->add_option("--tol", s->tol)->check(CLI::PositiveNumber);
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const SignalMatrix y = s->in.load();
                const auto stack = ksvarm::build_kernel_stack(y, s->order, ksvarm::parse_kernels(s->kernels, y));
                ksvarm::KsvarmOptions opts;
                opts.tol = s->tol;
                opts.instantaneous = !s->lagged_only;
                opts.edge_threshold = s->out.weight_tol;
                const double lmax = ksvarm::ksvarm_lambda_max(stack, opts);
                const double lambda = s->lambda >= 0.0 ? s->lambda : s->lambda_ratio * lmax;
                const auto model = s->mkl ? ksvarm::mkl_fit(stack, lambda, opts) : ksvarm::ksvarm_fit(stack, lambda, opts);
                write_graph(s->out, model.edge_graph);
                Json kernels = Json::array();
                for (const auto& k : stack.specs()) kernels.push_back(k.describe());
                write_report(s->out, *app, y.n_nodes(),
                             {{"kernels", std::move(kernels)},
                              {"lambda", lambda},
                              {"lambda_max", lmax},
                              {"group_norms", model.group_norms},
                              {"converged", model.converged},
                              {"objective_trace", trace_json(model.objective_trace)}});
            }};
}

Command tv_smooth_command(CLI::App& root)
{
    struct State
    {
        SlotInput in;
        OutputOptions out;
        double alpha = 1.0;
        double beta = 1.0;
        double eta = 1.0;
        Index max_sweeps = 500;
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("tv-smooth", "Time-varying graphs from smooth signals");
    s->in.add(*app, "Signal CSV of one slot (repeat per slot)");
    app->add_option("--alpha", s->alpha)->check(CLI::PositiveNumber);
    app->add_option("--beta", s->beta)->check(CLI::PositiveNumber);
    app->add_option("--eta", s->eta, "Temporal smoothness weight")->check(CLI::NonNegativeNumber);
    app->add_option("--max-sweeps", s->max_sweeps)->check(CLI::PositiveNumber);
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const auto slots = s->in.load();
                std::vector<smoothlearn::DistanceVector> e;
                for (const auto& y : slots) e.push_back(smoothlearn::distance_vector(y));
                const auto res = dynjd::tv_smooth_learn(e, s->alpha, s->beta, s->eta, {.max_sweeps = s->max_sweeps});
                write_graphs(s->out, res.graphs.graphs());
                write_report(s->out, *app, slots.front().n_nodes(),
                             {{"sweeps", res.sweeps},
                              {"converged", res.converged},
                              {"objective_trace", trace_json(res.objective_trace)},
                              {"temporal_differences", res.graphs.temporal_differences()}});
            }};
}

Command tv_glasso_command(CLI::App& root)
{
    struct State
    {
        SlotInput in;
        OutputOptions out;
        double lambda = -1.0;
        double eta = 1.0;
        Index max_sweeps = 500;
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("tv-glasso", "Time-varying graphical lasso");
    s->in.add(*app, "Signal CSV of one slot (repeat per slot)");
    app->add_option("--lambda", s->lambda, "l1 weight; negative selects 2 sqrt(log N / T_min)");
    app->add_option("--eta", s->eta, "Temporal smoothness weight")->check(CLI::NonNegativeNumber);
    app->add_option("--max-sweeps", s->max_sweeps)->check(CLI::PositiveNumber);
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const auto slots = s->in.load();
                std::vector<gmrf::CovarianceEstimate> covs;
                Index t_min = slots.front().n_samples();
                for (const auto& y : slots) {
                    covs.push_back(corrnet::sample_covariance(y));
                    t_min = std::min(t_min, y.n_samples());
                }
                const Index n = slots.front().n_nodes();
                const double lambda = s->lambda < 0.0 ? gmrf::default_lambda(n, t_min) : s->lambda;
                dynjd::TvGlassoOptions opts;
                opts.sweep.max_sweeps = s->max_sweeps;
                const auto res = dynjd::tv_graphical_lasso(covs, lambda, s->eta, opts);
                std::vector<Graph> graphs;
                for (const auto& p : res.precisions) graphs.push_back(gmrf::precision_support(p.theta, s->out.weight_tol));
                write_graphs(s->out, graphs);
                write_report(s->out, *app, n,
                             {{"lambda", lambda},
                              {"sweeps", res.sweeps},
                              {"converged", res.converged},
                              {"objective_trace", trace_json(res.objective_trace)},
                              {"temporal_differences", res.temporal_differences()}});
            }};
}

Command dyn_sem_command(CLI::App& root)
{
    struct State
    {
        std::vector<std::string> inputs;
        std::string exog;
        OutputOptions out;
        double gamma = 0.9;
        std::vector<double> alpha{0.1};
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("dyn-sem", "Dynamic SEM tracking from cascades");
    app->add_option("--input", s->inputs, "N x C cascade snapshot CSV (repeat per slot)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--exog", s->exog, "N x C exogenous input CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--gamma", s->gamma, "Forgetting factor")->check(CLI::Range(0.0, 1.0));
    app->add_option("--alpha", s->alpha, "l1 weight, one value or one per slot")->check(CLI::NonNegativeNumber);
    add_output_options(*app, s->out);
    return {app, [s, app] {
                std::vector<Matrix> cascades;
                for (const auto& p : s->inputs) cascades.push_back(load_matrix(p));
                const Matrix x = load_matrix(s->exog);
                std::vector<double> alpha = s->alpha;
                if (alpha.size() == 1) alpha.assign(cascades.size(), alpha.front());
                if (alpha.size() != cascades.size()) throw ParamError("--alpha needs one value or one per slot");
                const auto res = dynjd::dynamic_sem_track(cascades, x, s->gamma, alpha);
                write_graphs(s->out, res.graphs.graphs());
                write_report(s->out, *app, x.rows(),
                             {{"converged", res.converged},
                              {"temporal_differences", res.graphs.temporal_differences()}});
            }};
}

Command jd_command(CLI::App& root)
{
    struct State
    {
        SignalInput in;
        OutputOptions out;
        std::string segments;
        std::string anchors;
        double tol = 1e-13;
        Index max_iter = 2000;
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("jd", "Anchored joint diagonalization of segment correlations");
    s->in.add(*app);
    app->add_option("--segments", s->segments, "Segment boundary file (first 0, last T)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--anchors", s->anchors, "Known weights \"i,j,value;...\" (0-based, W(i,j) = value)");
    app->add_option("--tol", s->tol)->check(CLI::NonNegativeNumber);
    app->add_option("--max-iter", s->max_iter)->check(CLI::PositiveNumber);
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const SignalMatrix y = s->in.load();
                dynjd::JdProblem problem;
                problem.slices = dynjd::segment_correlations(y, load_boundaries(s->segments));
                problem.anchors = dynjd::parse_anchors(s->anchors);
                const auto res = dynjd::jd_fit(problem, {.tol = s->tol, .max_iter = s->max_iter});
                write_graph(s->out, res.w);
                write_report(s->out, *app, y.n_nodes(),
                             {{"residual", res.residual},
                              {"residual_trace", trace_json(res.residual_trace)},
                              {"iterations", res.iterations},
                              {"converged", res.converged},
                              {"unanchored_rows", res.unanchored_rows},
                              {"h", matrix_json(res.h)}});
            }};
}

Command jisg_command(CLI::App& root)
{
    struct State
    {
        std::string input;
        OutputOptions out;
        std::string signals;
        double mu = 1.0;
        double l1 = 10.0;
        double l2 = 0.1;
        jisg::JisgOptions opts;
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("jisg", "Joint signal reconstruction and SEM topology from partial samples");
    app->add_option("--input", s->input, "N x T CSV, empty cells are unobserved")->required()->check(CLI::ExistingFile);
    app->add_option("--signals", s->signals, "Write the reconstructed signals as CSV");
    app->add_option("--mu", s->mu, "Data-fit weight")->check(CLI::PositiveNumber);
    app->add_option("--l1", s->l1)->check(CLI::NonNegativeNumber);
    app->add_option("--l2", s->l2)->check(CLI::PositiveNumber);
    app->add_option("--sweeps", s->opts.sweeps)->check(CLI::PositiveNumber);
    app->add_option("--tol", s->opts.tol)->check(CLI::NonNegativeNumber);
    add_output_options(*app, s->out);
    return {app, [s, app] {
                const Matrix y = load_matrix(s->input, true);
                const auto obs = jisg::PartialObservations::from_matrix(y);
                const auto res = jisg::jisg_fit(obs, s->mu, s->l1, s->l2, s->opts);
                if (!s->signals.empty()) io::write_matrix_file(s->signals, res.signals);
                write_graph(s->out, res.w);
                Index observed = 0;
                for (Index t = 0; t < obs.n_slots(); ++t) observed += obs.n_observed(t);
                write_report(s->out, *app, obs.n_nodes(),
                             {{"n_slots", obs.n_slots()},
                              {"observed_fraction",
                               static_cast<double>(observed) / static_cast<double>(obs.n_nodes() * obs.n_slots())},
                              {"sweeps", res.sweeps},
                              {"converged", res.converged},
                              {"objective_trace", trace_json(res.objective_trace)}});
            }};
}

Command synth_command(CLI::App& root)
{
    struct State
    {
        std::string kind = "erdos_renyi";
        SyntheticParams params;
        Index t = 100;
        std::uint64_t seed = 1;
        double delta = 1.0;
        double noise = 1.0;
        std::string graph = "graph.csv";
        std::string signals = "signals.csv";
        std::string format = "csv";
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("synth", "Synthetic ground-truth graph and signals");
    app->add_option("--kind", s->kind)->check(CLI::IsMember({"erdos_renyi", "chain", "random_dag"}));
    app->add_option("--n", s->params.n_nodes, "Node count");
    app->add_option("--t", s->t, "Sample count");
    app->add_option("--p", s->params.edge_prob, "Edge probability");
    app->add_option("--seed", s->seed);
    app->add_option("--weight-low", s->params.weight_low);
    app->add_option("--weight-high", s->params.weight_high);
    app->add_flag("--signed", s->params.signed_weights, "random_dag: random weight signs");
    app->add_option("--delta", s->delta, "Diagonal loading of the smooth-signal precision");
    app->add_option("--noise", s->noise, "SEM noise scale (random_dag)");
    app->add_option("--graph", s->graph, "Ground-truth edge list file");
    app->add_option("--signals", s->signals, "N x T signal CSV file");
    app->add_option("--format", s->format, "Graph file format")->check(CLI::IsMember({"csv", "json"}));
    return {app, [s] {
                const SyntheticKind kind = s->kind == "chain"        ? SyntheticKind::chain
                                           : s->kind == "random_dag" ? SyntheticKind::random_dag
                                                                     : SyntheticKind::erdos_renyi;
                const Graph g = generate_synthetic(kind, s->params, s->seed);
                const SignalMatrix y = kind == SyntheticKind::random_dag
                                           ? generate_sem_signals(g, s->t, s->noise, s->seed + 1)
                                           : generate_smooth_signals(g, s->t, s->delta, s->seed + 1);
                OutputOptions out;
                out.output = s->graph;
                out.format = s->format;
                out.weight_tol = 0.0;
                write_graph(out, g);
                io::write_matrix_file(s->signals, y.data());
            }};
}

Command score_command(CLI::App& root)
{
    struct State
    {
        std::string estimate;
        std::string truth;
        Index n = 0;
        bool directed = false;
        double tol = default_weight_tol;
        std::string output;
    };
    auto s = std::make_shared<State>();
    auto* app = root.add_subcommand("score", "Support recovery of an estimated edge list against the truth");
    app->add_option("--estimate", s->estimate)->required()->check(CLI::ExistingFile);
    app->add_option("--truth", s->truth)->required()->check(CLI::ExistingFile);
    app->add_option("--n", s->n, "Node count")->required()->check(CLI::Range(Index{2}, Index{1} << 30));
    app->add_flag("--directed", s->directed);
    app->add_option("--weight-tol", s->tol)->check(CLI::NonNegativeNumber);
    app->add_option("--output", s->output, "JSON score file (stdout when omitted)");
    return {app, [s] {
                const Graph est = io::read_edge_list_file(s->estimate, s->n, s->directed);
                const Graph truth = io::read_edge_list_file(s->truth, s->n, s->directed);
                const auto r = score_recovery(est, truth, s->tol);
                const Json doc = {{"precision", r.precision},
                                  {"recall", r.recall},
                                  {"f1", r.f1},
                                  {"frobenius_error", r.frobenius_error},
                                  {"true_positives", r.true_positives},
                                  {"false_positives", r.false_positives},
                                  {"false_negatives", r.false_negatives}};
                write_text(s->output, doc.dump(2) + "\n");
            }};
}

} // namespace

std::vector<Command> register_commands(CLI::App& app)
{
    return {corr_command(app),      glasso_command(app),    smooth_command(app),    disc_command(app),
            sem_command(app),       dag_command(app),       varm_command(app),      ksvarm_command(app),
            tv_smooth_command(app), tv_glasso_command(app), dyn_sem_command(app),   jd_command(app),
            jisg_command(app),      synth_command(app),     score_command(app)};
}

} // namespace graphtopo::cli
