#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reworkbench/errors.hpp"
#include "reworkbench/harness.hpp"

namespace rb = reworkbench;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw rb::ConfigError("cannot write " + path.string());
    out << text;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rb::ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

rb::DetectPolicy policy_from(const std::string& mode, std::size_t min_unit_len,
                             std::size_t min_reps) {
    rb::DetectPolicy policy;
    if (mode == "tandem") {
        policy.mode = rb::DetectMode::Tandem;
    } else if (mode == "recurrent") {
        policy.mode = rb::DetectMode::Recurrent;
    } else {
        throw rb::ConfigError("unknown policy '" + mode + "' (expected tandem or recurrent)");
    }
    policy.min_unit_len = min_unit_len;
    policy.min_repetitions = min_reps;
    return policy;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark harness for rework-anomaly detection over event-log variants"};
    app.require_subcommand(1);

    // --- generate ---------------------------------------------------------
    auto* generate = app.add_subcommand(
        "generate", "Generate a synthetic labeled corpus (normals.csv + anomalies.csv)");
    rb::GenerateConfig gen_cfg;
    std::string gen_policy = "tandem";
    std::size_t gen_min_unit = 1, gen_min_reps = 2;
    generate->add_option("--n-normal", gen_cfg.n_normal, "Number of normal variants");
    generate->add_option("--n-anomalous", gen_cfg.n_anomalous, "Number of reworked variants");
    generate->add_option("--alphabet", gen_cfg.alphabet_size, "Distinct activities");
    generate->add_option("--min-len", gen_cfg.min_len, "Minimum variant length");
    generate->add_option("--max-len", gen_cfg.max_len, "Maximum variant length");
    generate->add_option("--policy", gen_policy, "Labeling policy: tandem or recurrent");
    generate->add_option("--min-unit-len", gen_min_unit, "Smallest repeated unit");
    generate->add_option("--min-reps", gen_min_reps, "Fewest repetitions that count");
    generate->add_option("--seed", gen_cfg.seed, "Generator seed")->required();
    generate->add_option("--out", gen_cfg.out_dir, "Output directory");

    // --- layout -----------------------------------------------------------
    auto* layout = app.add_subcommand(
        "layout", "Arrange anomalies among normals under a placement distribution");
    rb::LayoutConfig lay_cfg;
    std::string lay_dist = "uniform";
    layout->add_option("--normals", lay_cfg.normals_path, "Normal variants CSV")->required();
    layout->add_option("--anomalies", lay_cfg.anomalies_path, "Anomalous variants CSV")
        ->required();
    layout->add_option("--distribution", lay_dist, "normal, uniform or exponential");
    layout->add_option("--seed", lay_cfg.spec.seed, "Layout seed")->required();
    layout->add_option("--mean-fraction", lay_cfg.spec.mean_fraction,
                       "Normal placement: mean as a fraction of the normal count");
    layout->add_option("--sigma-fraction", lay_cfg.spec.sigma_fraction,
                       "Normal placement: sigma as a fraction of the normal count");
    layout->add_option("--scale-fraction", lay_cfg.spec.scale_fraction,
                       "Exponential placement: scale as a fraction of the normal count");
    layout->add_option("--bins", lay_cfg.histogram_bins, "Histogram bins");
    layout->add_option("--out", lay_cfg.out_dir, "Output directory");

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand(
        "run", "Run the experiment grid: layout, prompting, agent loop, scoring, report");
    rb::ExperimentConfig run_cfg;
    std::vector<std::string> run_dists{"normal", "uniform", "exponential"};
    std::vector<std::string> run_modes{"zero", "one", "few"};
    std::string run_policy = "tandem";
    std::size_t run_min_unit = 1, run_min_reps = 2;
    bool run_synthetic = false;
    run->add_option("--dataset", run_cfg.dataset_path,
                    "Labeled VariantCsv holding both classes");
    run->add_option("--normals", run_cfg.normals_path, "Normal variants CSV");
    run->add_option("--anomalies", run_cfg.anomalies_path, "Anomalous variants CSV");
    run->add_flag("--synthetic", run_synthetic, "Generate the corpus in-process");
    run->add_option("--n-normal", run_cfg.synthetic_spec.n_normal, "Synthetic normal count");
    run->add_option("--n-anomalous", run_cfg.synthetic_spec.n_anomalous,
                    "Synthetic anomaly count");
    run->add_option("--alphabet", run_cfg.synthetic_spec.alphabet_size,
                    "Synthetic alphabet size");
    run->add_option("--min-len", run_cfg.synthetic_spec.min_len, "Synthetic minimum length");
    run->add_option("--max-len", run_cfg.synthetic_spec.max_len, "Synthetic maximum length");
    run->add_option("--distribution", run_dists,
                    "Placement distributions to sweep (repeatable)");
    run->add_option("--prompt", run_modes, "Prompt modes to sweep (repeatable)");
    run->add_option("--repeats", run_cfg.repeats, "Runs per (distribution, prompt) cell");
    run->add_option("--seed", run_cfg.master_seed, "Master seed")->required();
    run->add_option("--provider", run_cfg.provider_kind,
                    "openai-compatible, mock-perfect, mock-noisy or mock-delay");
    run->add_option("--endpoint", run_cfg.provider.endpoint,
                    "Chat-completions endpoint, e.g. https://api.openai.com/v1");
    run->add_option("--model", run_cfg.provider.model, "Model identifier");
    run->add_option("--credential-env", run_cfg.provider.credential_env,
                    "Environment variable holding the API key");
    run->add_option("--tpm-budget", run_cfg.provider.tpm_budget, "Tokens per minute");
    run->add_option("--timeout-secs", run_cfg.provider.run_deadline_secs,
                    "Wall-clock deadline per run; past it the run scores zero");
    run->add_option("--request-timeout-secs", run_cfg.provider.request_timeout_secs,
                    "Transport timeout per request");
    run->add_option("--max-agent-steps", run_cfg.provider.max_agent_steps,
                    "Tool-loop step cap per chunk");
    run->add_option("--fp-rate", run_cfg.fp_rate, "mock-noisy false-positive rate");
    run->add_option("--fn-rate", run_cfg.fn_rate, "mock-noisy false-negative rate");
    run->add_option("--delay-secs", run_cfg.delay_secs, "mock-delay sleep per request");
    run->add_option("--policy", run_policy, "Oracle policy: tandem or recurrent");
    run->add_option("--min-unit-len", run_min_unit, "Smallest repeated unit");
    run->add_option("--min-reps", run_min_reps, "Fewest repetitions that count");
    run->add_option("--mean-fraction", run_cfg.mean_fraction, "Normal placement mean");
    run->add_option("--sigma-fraction", run_cfg.sigma_fraction, "Normal placement sigma");
    run->add_option("--scale-fraction", run_cfg.scale_fraction, "Exponential placement scale");
    run->add_option("--bins", run_cfg.histogram_bins, "Histogram bins");
    run->add_flag("--relayout-per-run", run_cfg.relayout_per_run,
                  "Re-sample the layout for every repeat");
    run->add_option("--out", run_cfg.out_dir, "Output directory");

    // --- score -------------------------------------------------------------
    auto* score = app.add_subcommand(
        "score", "Recompute metrics offline from a dataset and a predictions file");
    std::filesystem::path score_dataset, score_predictions, score_out;
    std::string score_dist = "uniform", score_mode = "zero";
    int score_run_index = 0;
    score->add_option("--dataset", score_dataset, "Arranged labeled VariantCsv")->required();
    score->add_option("--predictions", score_predictions, "Raw model answers")->required();
    score->add_option("--distribution", score_dist, "Label for the metrics row");
    score->add_option("--prompt", score_mode, "Label for the metrics row");
    score->add_option("--run-index", score_run_index, "Label for the metrics row");
    score->add_option("--out", score_out, "metrics.csv destination (default: stdout)");

    // --- report ------------------------------------------------------------
    auto* report = app.add_subcommand(
        "report", "Render report.md / report.csv from a stored metrics.csv");
    std::filesystem::path report_metrics, report_baselines, report_out = ".";
    std::string report_label = "this harness";
    report->add_option("--metrics", report_metrics, "metrics.csv produced by run/score")
        ->required();
    report->add_option("--baselines", report_baselines,
                       "Override the shipped reference results CSV");
    report->add_option("--label", report_label, "Method label for the comparison table");
    report->add_option("--out", report_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (generate->parsed()) {
            gen_cfg.policy = policy_from(gen_policy, gen_min_unit, gen_min_reps);
            const auto files = rb::generate_dataset_files(gen_cfg);
            std::cout << "wrote " << files.normals_csv.string() << " and "
                      << files.anomalies_csv.string() << "\n";
        } else if (layout->parsed()) {
            lay_cfg.spec.kind = rb::parse_layout_kind(lay_dist);
            const auto files = rb::lay_out_dataset_files(lay_cfg);
            std::cout << "wrote " << files.dataset_csv.string() << ", "
                      << files.layout_json.string() << " and "
                      << files.histogram_csv.string() << "\n";
        } else if (run->parsed()) {
            run_cfg.synthetic = run_synthetic;
            run_cfg.policy = policy_from(run_policy, run_min_unit, run_min_reps);
            run_cfg.distributions.clear();
            for (const auto& d : run_dists) {
                run_cfg.distributions.push_back(rb::parse_layout_kind(d));
            }
            run_cfg.modes.clear();
            for (const auto& m : run_modes) {
                run_cfg.modes.push_back(rb::parse_prompt_mode(m));
            }
            const auto result = rb::run_experiment(run_cfg);
            std::cout << "wrote " << result.metrics_csv.string() << " and "
                      << result.report_md.string() << "\n";
            if (result.provider_errors > 0) {
                std::cerr << result.provider_errors
                          << " run(s) failed with provider errors\n";
                return 2;
            }
        } else if (score->parsed()) {
            auto row = rb::score_files(score_dataset, score_predictions);
            row.distribution = score_dist;
            row.prompt_mode = score_mode;
            row.run_index = score_run_index;
            const std::string csv = rb::to_metrics_csv({row});
            if (score_out.empty()) {
                std::cout << csv;
            } else {
                write_file(score_out, csv);
                std::cout << "wrote " << score_out.string() << "\n";
            }
        } else if (report->parsed()) {
            const auto rows = rb::parse_metrics_csv(read_file(report_metrics));
            // Rebuild cell averages from completed and timed-out rows.
            std::vector<rb::CellAverage> cells;
            for (const auto& r : rows) {
                if (r.status == "provider_error") continue;
                bool found = false;
                for (auto& c : cells) {
                    found = c.distribution == r.distribution && c.prompt_mode == r.prompt_mode;
                    if (found) break;
                }
                if (found) continue;
                std::vector<rb::MetricsRow> cell_rows;
                for (const auto& other : rows) {
                    if (other.status != "provider_error" &&
                        other.distribution == r.distribution &&
                        other.prompt_mode == r.prompt_mode) {
                        cell_rows.push_back(other);
                    }
                }
                cells.push_back(rb::aggregate(cell_rows));
            }
            const auto baselines = report_baselines.empty()
                                       ? rb::builtin_baselines()
                                       : rb::parse_baselines_csv(read_file(report_baselines));
            const auto rendered = rb::render_report(rows, cells, baselines, report_label);
            std::filesystem::create_directories(report_out);
            write_file(report_out / "report.md", rendered.markdown);
            write_file(report_out / "report.csv", rendered.comparison_csv);
            std::cout << "wrote " << (report_out / "report.md").string() << "\n";
        }
    } catch (const rb::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const rb::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const rb::GatewayError& e) {
        std::cerr << "provider error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
