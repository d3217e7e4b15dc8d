// oddbench: generate singleton search arrays, run reference saliency models,
// evaluate saliency maps and aggregate the results.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <oddbench/dataset_io.hpp>
#include <oddbench/harness.hpp>
#include <oddbench/plots.hpp>
#include <oddbench/refmodels.hpp>
#include <oddbench/stimgen.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace fs = std::filesystem;
using namespace oddbench;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    return read_json(path);
}

int cmd_generate(const std::string& out, const std::string& config_path, const CLI::Option* seed_opt,
                 std::uint64_t seed_flag, const CLI::Option* workers_opt, int workers_flag, bool supersample) {
    const nlohmann::json cfg = load_config(config_path);
    SweepConfig sweep;
    try {
        sweep = cfg.get<SweepConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid generate config: ") + e.what());
    }
    if (supersample) sweep.array.supersample = true;
    const std::uint64_t seed = seed_opt->count() ? seed_flag : cfg.value("seed", std::uint64_t{0});
    const int workers = workers_opt->count() ? workers_flag : cfg.value("workers", 0);

    const auto start = std::chrono::steady_clock::now();
    const DatasetManifest m = gen_dataset(sweep, out, seed, workers);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "generated " << m.total() << " samples in " << out << " (";
    bool first = true;
    for (const auto& [f, n] : m.counts) {
        std::cout << (first ? "" : ", ") << to_string(f) << " " << n;
        first = false;
    }
    std::cout << ") in " << secs << " s\n";
    return 0;
}

int cmd_model_run(const std::string& model, const std::string& dataset, const std::string& out, bool center_bias,
                  int working_width, int workers) {
    ModelConfig cfg = ModelConfig::for_model(model_from_string(model));
    cfg.center_bias = center_bias;
    if (working_width > 0) cfg.working_width = working_width;
    const int n = run_model_on_dataset(dataset, out, cfg, workers);
    std::cout << "wrote " << n << " " << model << " maps to " << out << "\n";
    return 0;
}

int cmd_evaluate(const std::string& dataset, const std::string& maps, const std::string& out,
                 const std::string& config_path, const CLI::Option* max_fix_opt, int max_fix,
                 const CLI::Option* supp_opt, double supp, int workers) {
    const nlohmann::json cfg_json = load_config(config_path);
    const nlohmann::json fj = cfg_json.value("fixsim", nlohmann::json::object());
    FixSimConfig cfg;
    cfg.suppression_radius = fj.value("suppression_radius", cfg.suppression_radius);
    cfg.hit_radius_base = fj.value("hit_radius_base", cfg.hit_radius_base);
    cfg.hit_radius_max = fj.value("hit_radius_max", cfg.hit_radius_max);
    cfg.max_fixations = fj.value("max_fixations", cfg.max_fixations);
    if (max_fix_opt->count()) cfg.max_fixations = max_fix;
    if (supp_opt->count()) cfg.suppression_radius = supp;

    const EvalReport report = run_eval(dataset, maps, cfg, workers);
    write_report_csv(report, out);
    int found = 0;
    for (const auto& r : report.rows) found += r.found;
    std::cout << "evaluated " << report.rows.size() << " images, targets found " << found << ", report " << out << "\n";
    return 0;
}

int cmd_aggregate(const std::string& report_path, const std::string& o3_dir, const std::string& out,
                  const BinWidths& widths, std::vector<int> budgets) {
    const EvalReport report = read_report_csv(report_path);
    std::vector<AnnotatedScene> scenes;
    if (!o3_dir.empty())
        for (const auto& p : list_o3_annotations(o3_dir)) scenes.push_back(load_o3_annotation(p, false));
    std::sort(budgets.begin(), budgets.end());
    const AggregateSummary summary = aggregate_report(report, scenes, widths, budgets);
    write_aggregates(summary, out);
    std::cout << "aggregated " << report.rows.size() << " rows into " << out << "\n";
    return 0;
}

int cmd_plot(const std::string& in, const std::string& out) {
    const auto paths = plot_directory(in, out);
    for (const auto& p : paths) std::cout << p.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Singleton pop-out saliency benchmark"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a dataset of singleton search arrays");
    std::string gen_out, gen_config;
    std::uint64_t gen_seed = 0;
    int gen_workers = 0;
    bool gen_supersample = false;
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--config", gen_config, "JSON config (array spec, feature sweeps, seed, workers)");
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "Random seed");
    auto* gen_workers_opt = gen->add_option("--workers", gen_workers, "Worker threads (0 = all cores)");
    gen->add_flag("--supersample", gen_supersample, "Anti-alias images with 4x4 supersampling");

    // model run
    auto* model = app.add_subcommand("model", "Reference saliency models");
    model->require_subcommand(1);
    auto* model_run = model->add_subcommand("run", "Run a model over a dataset");
    std::string model_name, model_dataset, model_out;
    bool center_bias = false;
    int working_width = 0, model_workers = 0;
    model_run->add_option("--model", model_name, "signature | cs_contrast")
        ->required()
        ->check(CLI::IsMember({"signature", "cs_contrast"}));
    model_run->add_option("--dataset", model_dataset, "Dataset directory")->required();
    model_run->add_option("--out", model_out, "Output directory for 16-bit maps")->required();
    model_run->add_flag("--center-bias", center_bias, "Add a centered Gaussian prior");
    model_run->add_option("--working-width", working_width, "Override the model's working width");
    model_run->add_option("--workers", model_workers, "Worker threads (0 = all cores)");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Evaluate saliency maps against a dataset");
    std::string eval_dataset, eval_maps, eval_out, eval_config;
    int max_fix = 100, eval_workers = 0;
    double supp = 35.0;
    eval->add_option("--dataset", eval_dataset, "Dataset directory")->required();
    eval->add_option("--maps", eval_maps, "Directory of <id>.png saliency maps")->required();
    eval->add_option("--out", eval_out, "Report CSV path")->required();
    eval->add_option("--config", eval_config, "JSON config with a \"fixsim\" section");
    auto* max_fix_opt = eval->add_option("--max-fixations", max_fix, "Fixation budget per image");
    auto* supp_opt = eval->add_option("--suppression-radius", supp, "Suppression radius in px");
    eval->add_option("--workers", eval_workers, "Worker threads (0 = all cores)");

    // aggregate
    auto* agg = app.add_subcommand("aggregate", "Aggregate a report into curves and tables");
    std::string agg_report, agg_o3, agg_out;
    BinWidths widths;
    std::vector<int> budgets = default_budgets();
    agg->add_option("--report", agg_report, "Report CSV")->required();
    agg->add_option("--o3-annotations", agg_o3, "Directory of scene annotation sidecars");
    agg->add_option("--out", agg_out, "Output directory")->required();
    agg->add_option("--hue-bin", widths.hue_deg, "Hue difference bin width (deg)");
    agg->add_option("--orientation-bin", widths.orientation_deg, "Orientation difference bin width (deg)");
    agg->add_option("--size-bin", widths.size_ratio, "Size ratio bin width");
    agg->add_option("--budgets", budgets, "Fixation budgets for detection curves");

    // plot
    auto* plot = app.add_subcommand("plot", "Render SVG charts from aggregated curves");
    std::string plot_in, plot_out;
    plot->add_option("--in", plot_in, "Directory written by aggregate")->required();
    plot->add_option("--out", plot_out, "Output directory for SVG files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*gen)
            return cmd_generate(gen_out, gen_config, gen_seed_opt, gen_seed, gen_workers_opt, gen_workers, gen_supersample);
        if (*model_run) return cmd_model_run(model_name, model_dataset, model_out, center_bias, working_width, model_workers);
        if (*eval) return cmd_evaluate(eval_dataset, eval_maps, eval_out, eval_config, max_fix_opt, max_fix, supp_opt, supp, eval_workers);
        if (*agg) return cmd_aggregate(agg_report, agg_o3, agg_out, widths, budgets);
        if (*plot) return cmd_plot(plot_in, plot_out);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
