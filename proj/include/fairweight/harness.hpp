#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fairweight/dataset.hpp"
#include "fairweight/ga.hpp"
#include "fairweight/metrics.hpp"
#include "fairweight/model.hpp"
#include "fairweight/pareto.hpp"
#include "fairweight/stats.hpp"

namespace fairweight {

enum class Method { EQ, DW, EW };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

// Full description of one experiment: a weighting method evaluated on one
// dataset under one metric pair, at a fixed per-replicate evaluation budget.
struct ExperimentConfig {
    std::string data_path;
    std::string dataset_name;
    DatasetSchema schema;
    Method method = Method::EQ;
    MetricPair metric_pair;
    std::size_t replicates = 20;
    std::size_t evaluation_budget = 1000;
    ModelSpec model;
    std::size_t ga_pop_size = 20;  // EW: max_gen = evaluation_budget / ga_pop_size
    double crossover_prob = 0.8;
    double per_gene_mutation_prob = 0.1;
    double mutation_sigma = 1.0;
    std::size_t cv_folds = 10;
    double test_fraction = 0.25;
    bool undersample_train = false;
    std::uint64_t master_seed = 0;
    std::string out_dir;  // empty: keep results in memory only
    unsigned threads = 0; // 0 = hardware concurrency

    void validate() const;
    std::string to_json_text() const;
};

struct ReplicateResult {
    double hypervolume = 0.0;
    ParetoFront front;
    std::vector<EvaluatedPoint> points;  // all test-set evaluations
    std::vector<ArchiveEntry> archive;   // EW only
    double seconds = 0.0;
    std::uint64_t n_evaluations = 0;     // weight-vector evaluations (budget parity)
};

struct RunResult {
    Method method = Method::EQ;
    std::vector<std::uint64_t> replicate_seeds;
    std::vector<ReplicateResult> replicates;
};

// One replicate: derive the replicate seed, split, (optionally) undersample
// the training part, evaluate the method's 1000 weightings, score everything
// on the test set, and reduce to a Pareto front and its hypervolume.
ReplicateResult run_replicate(const ExperimentConfig& cfg, const Dataset& ds,
                              std::size_t replicate_index);

RunResult run_experiment(const ExperimentConfig& cfg, const Dataset& ds);
RunResult run_experiment(const ExperimentConfig& cfg);  // loads cfg.data_path

// Persist a run: config snapshot, manifest (seeds, versions, evaluation
// counts), per-replicate front CSVs, hypervolume CSV, EW archives.
void write_run_result(const ExperimentConfig& cfg, const RunResult& result);

// The slice of a persisted run needed for cross-method comparison.
struct MethodRun {
    Method method = Method::EQ;
    std::string dataset_name;
    std::string metric_pair_label;
    std::vector<std::uint64_t> replicate_seeds;
    std::vector<double> hypervolumes;
};

MethodRun load_method_run(const std::string& dir);
MethodRun to_method_run(const ExperimentConfig& cfg, const RunResult& result);

// Columns ordered EQ, DW, EW. Raises SeedMismatch unless all runs share the
// same replicate seeds (the pairing the statistics assume).
HypervolumeTable build_hypervolume_table(const std::vector<MethodRun>& runs);

StatReport compare_runs(const std::vector<MethodRun>& runs, double alpha = 0.05);

// plot_<dataset>.csv (method,replicate,hypervolume) and a static SVG strip
// plot with jittered per-replicate points and a median bar per method.
void emit_plots(const std::vector<MethodRun>& runs, const std::string& out_dir);

} // namespace fairweight
