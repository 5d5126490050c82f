// fairweight: compare sample-weighting strategies for fair binary
// classification by the hypervolume of their predictive/fairness Pareto
// fronts.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fairweight/harness.hpp"
#include "fairweight/reweight.hpp"

namespace fw = fairweight;

namespace {

fw::MetricPair parse_pair(const std::string& predictive, const std::string& fairness) {
    fw::MetricPair pair;
    if (predictive == "acc")
        pair.predictive = fw::Predictive::Acc;
    else if (predictive == "roc")
        pair.predictive = fw::Predictive::Roc;
    else
        fw::raise(fw::Errc::InvalidConfig, "unknown predictive metric '" + predictive + "'");
    if (fairness == "dpd")
        pair.fairness = fw::Fairness::Dpd;
    else if (fairness == "sfn")
        pair.fairness = fw::Fairness::Sfn;
    else
        fw::raise(fw::Errc::InvalidConfig, "unknown fairness metric '" + fairness + "'");
    return pair;
}

std::string dataset_name_from(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sample reweighting strategies compared by Pareto-front hypervolume"};
    app.require_subcommand(1);

    // weights ----------------------------------------------------------
    std::string w_data, w_schema, w_method = "dw";
    auto* weights_cmd = app.add_subcommand("weights", "print slot weights for a dataset as JSON");
    weights_cmd->add_option("--data", w_data, "CSV data file")->required();
    weights_cmd->add_option("--schema", w_schema, "schema JSON file")->required();
    weights_cmd->add_option("--method", w_method, "eq or dw (default dw)")
        ->check(CLI::IsMember({"eq", "dw"}));

    // run --------------------------------------------------------------
    fw::ExperimentConfig cfg;
    std::string r_method = "eq", r_predictive = "acc", r_fairness = "dpd", r_model = "logistic";
    std::string r_schema;
    double features_per_split = 0.0;
    auto* run_cmd = app.add_subcommand("run", "run one method x dataset x metric pair");
    run_cmd->add_option("--data", cfg.data_path, "CSV data file")->required();
    run_cmd->add_option("--schema", r_schema, "schema JSON file")->required();
    run_cmd->add_option("--method", r_method, "eq, dw or ew")
        ->required()
        ->check(CLI::IsMember({"eq", "dw", "ew"}));
    run_cmd->add_option("--predictive", r_predictive, "acc or roc")
        ->check(CLI::IsMember({"acc", "roc"}));
    run_cmd->add_option("--fairness", r_fairness, "dpd or sfn")->check(CLI::IsMember({"dpd", "sfn"}));
    run_cmd->add_option("--replicates", cfg.replicates, "independent replicates (default 20)");
    run_cmd->add_option("--budget", cfg.evaluation_budget,
                        "weight-vector evaluations per replicate (default 1000)");
    run_cmd->add_option("--seed", cfg.master_seed, "master seed");
    run_cmd->add_option("--test-fraction", cfg.test_fraction, "held-out fraction (default 0.25)");
    run_cmd->add_flag("--undersample", cfg.undersample_train,
                      "undersample the majority class of the training part");
    run_cmd->add_option("--model", r_model, "logistic or forest")
        ->check(CLI::IsMember({"logistic", "forest"}));
    run_cmd->add_option("--out", cfg.out_dir, "output directory")->required();
    run_cmd->add_option("--name", cfg.dataset_name, "dataset name for reports (default: file stem)");
    run_cmd->add_option("--pop-size", cfg.ga_pop_size, "GA population size (default 20)");
    run_cmd->add_option("--cv-folds", cfg.cv_folds, "GA cross-validation folds (default 10)");
    run_cmd->add_option("--learning-rate", cfg.model.logistic.learning_rate, "logistic step size");
    run_cmd->add_option("--iterations", cfg.model.logistic.iterations, "logistic iterations");
    run_cmd->add_option("--l2", cfg.model.logistic.l2_penalty, "logistic L2 penalty");
    run_cmd->add_option("--trees", cfg.model.forest.n_trees, "forest size");
    run_cmd->add_option("--max-depth", cfg.model.forest.max_depth, "forest tree depth");
    run_cmd->add_option("--min-leaf-weight", cfg.model.forest.min_leaf_weight,
                        "minimum total weight per leaf");
    run_cmd->add_option("--features-per-split", features_per_split,
                        "fraction of features tried per split (default sqrt rule)");
    run_cmd->add_option("--threads", cfg.threads, "worker threads (default: all cores)");

    // compare ------------------------------------------------------------
    std::vector<std::string> cmp_dirs;
    std::string cmp_out;
    double cmp_alpha = 0.05;
    auto* compare_cmd =
        app.add_subcommand("compare", "significance tests over three method result directories");
    compare_cmd->add_option("dirs", cmp_dirs, "result directories (eq, dw, ew in any order)")
        ->expected(3);
    compare_cmd->add_option("--alpha", cmp_alpha, "significance level (default 0.05)");
    compare_cmd->add_option("--out", cmp_out, "directory for stats.json and table.txt");

    // report -------------------------------------------------------------
    std::vector<std::string> rep_dirs;
    std::string rep_out;
    auto* report_cmd = app.add_subcommand("report", "emit plot CSV and SVG from result directories");
    report_cmd->add_option("dirs", rep_dirs, "result directories")->expected(-1)->required();
    report_cmd->add_option("--out", rep_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (weights_cmd->parsed()) {
            const auto schema = fw::DatasetSchema::from_json_file(w_schema);
            const auto ds = fw::load_csv(w_data, schema);
            const auto gi = fw::build_group_index(ds);
            const auto sw =
                w_method == "eq" ? fw::equal_weights(gi) : fw::deterministic_weights(ds, gi);
            std::cout << fw::slot_weights_to_json(sw, gi) << '\n';
        } else if (run_cmd->parsed()) {
            cfg.schema = fw::DatasetSchema::from_json_file(r_schema);
            cfg.method = fw::method_from_string(r_method);
            cfg.metric_pair = parse_pair(r_predictive, r_fairness);
            cfg.model.kind = r_model == "forest" ? fw::ModelKind::WeightedForest
                                                 : fw::ModelKind::WeightedLogistic;
            if (features_per_split > 0.0)
                cfg.model.forest.features_per_split_fraction = features_per_split;
            if (cfg.dataset_name.empty()) cfg.dataset_name = dataset_name_from(cfg.data_path);
            cfg.validate();

            const auto result = fw::run_experiment(cfg);
            double total = 0.0;
            for (const auto& rep : result.replicates) total += rep.seconds;
            std::cout << "wrote " << cfg.out_dir << " (" << result.replicates.size()
                      << " replicates, " << total << " s)\n";
        } else if (compare_cmd->parsed()) {
            std::vector<fw::MethodRun> runs;
            for (const auto& dir : cmp_dirs) runs.push_back(fw::load_method_run(dir));
            const auto report = fw::compare_runs(runs, cmp_alpha);
            const auto table = fw::report_table_text(runs.front().dataset_name,
                                                     runs.front().metric_pair_label, report);
            std::cout << table;
            std::cout << report.to_json_text() << '\n';
            if (!cmp_out.empty()) {
                std::filesystem::create_directories(cmp_out);
                std::ofstream(std::filesystem::path(cmp_out) / "stats.json")
                    << report.to_json_text() << '\n';
                std::ofstream(std::filesystem::path(cmp_out) / "table.txt") << table;
            }
        } else if (report_cmd->parsed()) {
            std::vector<fw::MethodRun> runs;
            for (const auto& dir : rep_dirs) runs.push_back(fw::load_method_run(dir));
            fw::emit_plots(runs, rep_out);
            std::cout << "wrote plots to " << rep_out << '\n';
        }
    } catch (const fw::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fw::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
