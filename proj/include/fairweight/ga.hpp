#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "fairweight/dataset.hpp"
#include "fairweight/metrics.hpp"
#include "fairweight/model.hpp"
#include "fairweight/rng.hpp"

namespace fairweight {

// A slot-weight genome with its cross-validated objective scores and the
// NSGA-II bookkeeping attached.
struct Individual {
    std::vector<double> genome;  // length 2 * n_groups, values in [0, 2]
    double predictive = 0.0;     // validation mean, maximized
    double fairness = 0.0;       // validation mean, minimized
    int rank = 0;
    double crowding = 0.0;
    std::uint64_t id = 0;
    bool evaluated = false;

    EvaluatedPoint point() const { return {predictive, fairness}; }
};

struct GAConfig {
    std::size_t pop_size = 20;
    std::size_t max_gen = 50;
    std::size_t ind_size = 0;
    double crossover_prob = 0.8;
    double per_gene_mutation_prob = 0.1;
    double mutation_sigma = 1.0;
    double genome_lo = 0.0;
    double genome_hi = 2.0;
    std::size_t cv_folds = 10;
    std::uint64_t seed = 0;
    // Total weight-vector evaluations, initial population included. Must
    // equal pop_size * max_gen, so the loop runs max_gen - 1 offspring
    // generations.
    std::size_t evaluation_budget = 1000;

    void validate() const;
};

// Counts weight-vector evaluations (one per genome scored), not per-fold fits.
using EvalCounter = std::atomic<std::uint64_t>;

// Fixed-fold cross-validated fitness. Folds are drawn once so every genome
// sees identical partitions; the model seed is fixed for the whole run.
class CvEvaluator {
public:
    CvEvaluator(const ModelSpec& spec, const Dataset& train, MetricPair pair, std::size_t folds,
                std::uint64_t fold_seed, EvalCounter* counter = nullptr);

    // Mean (predictive, fairness) across folds. Folds that fail to fit or
    // score are skipped; if every fold fails the genome gets worst-case
    // fitness (predictive 0, fairness 1).
    EvaluatedPoint evaluate_genome(std::span<const double> genome) const;

    std::size_t n_slots() const { return n_slots_; }

private:
    struct FoldData {
        Dataset fit_part;
        GroupIndex fit_index;
        Dataset val_part;
        std::vector<int> val_groups;
    };
    ModelSpec spec_;
    MetricPair pair_;
    std::size_t n_slots_ = 0;
    std::vector<FoldData> folds_;
    EvalCounter* counter_ = nullptr;
};

// One record per evaluated genome, in evaluation order.
struct ArchiveEntry {
    std::uint64_t id = 0;
    std::size_t generation = 0;
    std::vector<double> genome;
    double cv_predictive = 0.0;
    double cv_fairness = 0.0;
};

std::vector<Individual> initialize_pop(const GAConfig& cfg, Rng& rng);

// Ranks under (maximize predictive, minimize fairness); rank 0 is the
// nondominated set, later ranks peel off iteratively.
std::vector<int> fast_nondominated_sort(std::span<const EvaluatedPoint> points);

// Deb-style crowding within one front: extreme points get +infinity, interior
// points sum the neighbor span over each objective's range. Points duplicated
// in the front get 0.
std::vector<double> crowding_distance(std::span<const EvaluatedPoint> front);

// Assign rank and crowding to every individual, over the whole set.
void assign_nondominated_scores(std::vector<Individual>& pop);

// Binary tournament: lower rank wins, then higher crowding, then a coin flip.
const Individual& tournament_select(std::span<const Individual> pop, Rng& rng);

// With probability p, uniform per-gene mixing; otherwise a clone of a.
std::vector<double> crossover(const Individual& a, const Individual& b, Rng& rng, double p = 0.8);

// Independent per-gene Gaussian perturbation, clamped into [lo, hi].
void mutate(std::vector<double>& genome, Rng& rng, double per_gene_p = 0.1, double sigma = 1.0,
            double lo = 0.0, double hi = 2.0);

// mu + lambda truncation over the combined set: fill by ascending rank,
// truncate the last front by descending crowding.
std::vector<Individual> survival_selection(std::vector<Individual> combined, std::size_t pop_size);

struct GaRunHooks {
    // called after each generation's survival selection (and once after the
    // initial population), with generation index and current population
    std::function<void(std::size_t, const std::vector<Individual>&)> on_generation;
};

// Must be pure: the result may be computed on any thread, in any order.
using GenomeEvaluator = std::function<EvaluatedPoint(std::span<const double>)>;

// Full run: init, evaluate, loop (tournament, crossover, mutate, evaluate,
// joint scoring, survival) until the evaluation budget is consumed. Returns
// every evaluated genome.
std::vector<ArchiveEntry> run_ga(const GAConfig& cfg, const GenomeEvaluator& evaluate_genome,
                                 const GaRunHooks& hooks = {}, unsigned threads = 0);

// Convenience overload wiring up the cross-validated fitness.
std::vector<ArchiveEntry> run_ga(const GAConfig& cfg, const ModelSpec& spec, const Dataset& train,
                                 MetricPair pair, EvalCounter* counter = nullptr,
                                 const GaRunHooks& hooks = {}, unsigned threads = 0);

// One JSON object per line: {"id", "generation", "genome", "cv_predictive", "cv_fairness"}.
void write_archive_jsonl(std::span<const ArchiveEntry> archive, std::ostream& out);

} // namespace fairweight
