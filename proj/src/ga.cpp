#include "fairweight/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "fairweight/parallel.hpp"
#include "fairweight/reweight.hpp"

namespace fairweight {

void GAConfig::validate() const {
    if (pop_size < 2) raise(Errc::InvalidConfig, "ga: pop_size must be at least 2");
    if (ind_size == 0) raise(Errc::InvalidConfig, "ga: ind_size must be positive");
    if (max_gen == 0) raise(Errc::InvalidConfig, "ga: max_gen must be positive");
    if (crossover_prob < 0.0 || crossover_prob > 1.0 || per_gene_mutation_prob < 0.0 ||
        per_gene_mutation_prob > 1.0)
        raise(Errc::InvalidConfig, "ga: operator probabilities must be in [0,1]");
    if (!(genome_lo < genome_hi)) raise(Errc::InvalidConfig, "ga: genome bounds must be ordered");
    if (cv_folds < 2) raise(Errc::InvalidConfig, "ga: cv_folds must be at least 2");
    if (evaluation_budget != pop_size * max_gen)
        raise(Errc::InvalidConfig, "ga: evaluation_budget must equal pop_size * max_gen (" +
                                       std::to_string(pop_size * max_gen) + "), got " +
                                       std::to_string(evaluation_budget));
}

CvEvaluator::CvEvaluator(const ModelSpec& spec, const Dataset& train, MetricPair pair,
                         std::size_t folds, std::uint64_t fold_seed, EvalCounter* counter)
    : spec_(spec), pair_(pair), counter_(counter) {
    const auto fold_indices = kfold_indices(train, folds, fold_seed);
    folds_.reserve(fold_indices.size());
    for (const auto& fi : fold_indices) {
        FoldData fd;
        fd.fit_part = train.subset(fi.train_rows);
        fd.fit_index = build_group_index(fd.fit_part);
        fd.val_part = train.subset(fi.val_rows);
        fd.val_groups = build_group_index(fd.val_part).group_of_row;
        folds_.push_back(std::move(fd));
    }
    n_slots_ = folds_.front().fit_index.n_slots;
}

EvaluatedPoint CvEvaluator::evaluate_genome(std::span<const double> genome) const {
    if (counter_) counter_->fetch_add(1, std::memory_order_relaxed);

    SlotWeights sw{std::vector<double>(genome.begin(), genome.end())};
    double pred_sum = 0.0, fair_sum = 0.0;
    std::size_t ok = 0;
    for (const auto& fold : folds_) {
        try {
            const auto weights = expand_and_assign(sw, fold.fit_part, fold.fit_index);
            const auto model = fit(spec_, fold.fit_part, weights);
            const auto scores = model.predict_scores(fold.val_part);
            const auto labels = threshold_labels(scores);
            const auto pt = score_pair(pair_, fold.val_part.target, labels, scores, fold.val_groups,
                                       fold.fit_index.n_groups);
            pred_sum += pt.predictive_score;
            fair_sum += pt.fairness_score;
            ++ok;
        } catch (const Error&) {
            // fold unusable for this genome (zero class mass, degenerate
            // validation labels, ...): skip it in the mean
        }
    }
    if (ok == 0) return {0.0, 1.0};  // worst case keeps the ordering total
    return {pred_sum / static_cast<double>(ok), fair_sum / static_cast<double>(ok)};
}

std::vector<Individual> initialize_pop(const GAConfig& cfg, Rng& rng) {
    std::vector<Individual> pop(cfg.pop_size);
    for (std::size_t i = 0; i < cfg.pop_size; ++i) {
        pop[i].id = i;
        pop[i].genome.resize(cfg.ind_size);
        for (auto& g : pop[i].genome) g = rng.real(cfg.genome_lo, cfg.genome_hi);
    }
    return pop;
}

namespace {

// maximize predictive, minimize fairness
bool dominates(const EvaluatedPoint& a, const EvaluatedPoint& b) {
    if (a.predictive_score < b.predictive_score || a.fairness_score > b.fairness_score) return false;
    return a.predictive_score > b.predictive_score || a.fairness_score < b.fairness_score;
}

} // namespace

std::vector<int> fast_nondominated_sort(std::span<const EvaluatedPoint> points) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<int> domination_count(n, 0);
    std::vector<int> rank(n, 0);

    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(points[p], points[q]))
                dominated_by[p].push_back(q);
            else if (dominates(points[q], points[p]))
                ++domination_count[p];
        }
        if (domination_count[p] == 0) {
            rank[p] = 0;
            current.push_back(p);
        }
    }

    int level = 0;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t p : current) {
            for (std::size_t q : dominated_by[p]) {
                if (--domination_count[q] == 0) {
                    rank[q] = level + 1;
                    next.push_back(q);
                }
            }
        }
        ++level;
        current = std::move(next);
    }
    return rank;
}

std::vector<double> crowding_distance(std::span<const EvaluatedPoint> front) {
    const std::size_t n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) return dist;

    constexpr double inf = std::numeric_limits<double>::infinity();

    // collapse exact duplicates: they have zero gap to their twin and are
    // assigned distance 0; unique values get the Deb neighbor span
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (front[a].predictive_score != front[b].predictive_score)
            return front[a].predictive_score < front[b].predictive_score;
        return front[a].fairness_score < front[b].fairness_score;
    });

    std::vector<std::size_t> rep;          // one index per distinct value
    std::vector<bool> duplicated(n, false);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && front[order[j]].predictive_score == front[order[i]].predictive_score &&
               front[order[j]].fairness_score == front[order[i]].fairness_score)
            ++j;
        rep.push_back(order[i]);
        if (j - i > 1)
            for (std::size_t k = i; k < j; ++k) duplicated[order[k]] = true;
        i = j;
    }

    const std::size_t m = rep.size();
    std::vector<double> rep_dist(m, 0.0);
    if (m == 1) {
        rep_dist[0] = inf;
    } else {
        for (int obj = 0; obj < 2; ++obj) {
            auto value = [&](std::size_t idx) {
                return obj == 0 ? front[idx].predictive_score : front[idx].fairness_score;
            };
            std::vector<std::size_t> by_obj(m);
            std::iota(by_obj.begin(), by_obj.end(), 0);
            std::stable_sort(by_obj.begin(), by_obj.end(), [&](std::size_t a, std::size_t b) {
                return value(rep[a]) < value(rep[b]);
            });
            const double range = value(rep[by_obj.back()]) - value(rep[by_obj.front()]);
            rep_dist[by_obj.front()] = inf;
            rep_dist[by_obj.back()] = inf;
            if (range <= 0.0) continue;
            for (std::size_t i = 1; i + 1 < m; ++i) {
                const std::size_t at = by_obj[i];
                if (rep_dist[at] == inf) continue;
                rep_dist[at] += (value(rep[by_obj[i + 1]]) - value(rep[by_obj[i - 1]])) / range;
            }
        }
    }

    for (std::size_t i = 0; i < m; ++i)
        if (!duplicated[rep[i]]) dist[rep[i]] = rep_dist[i];
    return dist;
}

void assign_nondominated_scores(std::vector<Individual>& pop) {
    std::vector<EvaluatedPoint> points(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) points[i] = pop[i].point();
    const auto ranks = fast_nondominated_sort(points);

    const int max_rank = pop.empty() ? -1 : *std::max_element(ranks.begin(), ranks.end());
    for (int r = 0; r <= max_rank; ++r) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < pop.size(); ++i)
            if (ranks[i] == r) members.push_back(i);
        std::vector<EvaluatedPoint> front(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) front[i] = points[members[i]];
        const auto crowd = crowding_distance(front);
        for (std::size_t i = 0; i < members.size(); ++i) {
            pop[members[i]].rank = r;
            pop[members[i]].crowding = crowd[i];
        }
    }
}

const Individual& tournament_select(std::span<const Individual> pop, Rng& rng) {
    const Individual& a = pop[rng.below(pop.size())];
    const Individual& b = pop[rng.below(pop.size())];
    if (a.rank != b.rank) return a.rank < b.rank ? a : b;
    if (a.crowding != b.crowding) return a.crowding > b.crowding ? a : b;
    return rng.coin() ? a : b;
}

std::vector<double> crossover(const Individual& a, const Individual& b, Rng& rng, double p) {
    if (a.genome.size() != b.genome.size())
        raise(Errc::LengthMismatch, "crossover: parents differ in genome length");
    if (rng.real() >= p) return a.genome;
    std::vector<double> child(a.genome.size());
    for (std::size_t i = 0; i < child.size(); ++i)
        child[i] = rng.coin() ? a.genome[i] : b.genome[i];
    return child;
}

void mutate(std::vector<double>& genome, Rng& rng, double per_gene_p, double sigma, double lo,
            double hi) {
    for (auto& g : genome) {
        if (rng.real() >= per_gene_p) continue;
        g = std::clamp(g + sigma * rng.normal(), lo, hi);
    }
}

std::vector<Individual> survival_selection(std::vector<Individual> combined, std::size_t pop_size) {
    assign_nondominated_scores(combined);

    std::stable_sort(combined.begin(), combined.end(), [](const Individual& a, const Individual& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        return a.crowding > b.crowding;
    });
    combined.resize(std::min(pop_size, combined.size()));
    return combined;
}

std::vector<ArchiveEntry> run_ga(const GAConfig& cfg, const GenomeEvaluator& evaluate_genome,
                                 const GaRunHooks& hooks, unsigned threads) {
    cfg.validate();

    std::vector<ArchiveEntry> archive;
    archive.reserve(cfg.evaluation_budget);

    auto evaluate_all = [&](std::vector<Individual>& group, std::size_t generation) {
        std::vector<EvaluatedPoint> results(group.size());
        parallel_for(
            group.size(),
            [&](std::size_t i) { results[i] = evaluate_genome(group[i].genome); }, threads);
        for (std::size_t i = 0; i < group.size(); ++i) {
            group[i].predictive = results[i].predictive_score;
            group[i].fairness = results[i].fairness_score;
            group[i].evaluated = true;
            archive.push_back({group[i].id, generation, group[i].genome, results[i].predictive_score,
                               results[i].fairness_score});
        }
    };

    Rng init_rng(derive_seed(cfg.seed, seed_purpose::kGaInit));
    auto pop = initialize_pop(cfg, init_rng);
    std::uint64_t next_id = cfg.pop_size;

    evaluate_all(pop, 0);
    assign_nondominated_scores(pop);
    if (hooks.on_generation) hooks.on_generation(0, pop);

    std::size_t generation = 1;
    while (archive.size() + cfg.pop_size <= cfg.evaluation_budget) {
        Rng ops_rng(derive_seed(cfg.seed, seed_purpose::kGaOps, generation));

        std::vector<Individual> offspring(cfg.pop_size);
        for (auto& child : offspring) {
            const Individual& parent_a = tournament_select(pop, ops_rng);
            const Individual& parent_b = tournament_select(pop, ops_rng);
            child.genome = crossover(parent_a, parent_b, ops_rng, cfg.crossover_prob);
            mutate(child.genome, ops_rng, cfg.per_gene_mutation_prob, cfg.mutation_sigma,
                   cfg.genome_lo, cfg.genome_hi);
            child.id = next_id++;
        }

        evaluate_all(offspring, generation);

        std::vector<Individual> combined = std::move(pop);
        combined.insert(combined.end(), std::make_move_iterator(offspring.begin()),
                        std::make_move_iterator(offspring.end()));
        pop = survival_selection(std::move(combined), cfg.pop_size);
        if (hooks.on_generation) hooks.on_generation(generation, pop);
        ++generation;
    }
    return archive;
}

std::vector<ArchiveEntry> run_ga(const GAConfig& cfg, const ModelSpec& spec, const Dataset& train,
                                 MetricPair pair, EvalCounter* counter, const GaRunHooks& hooks,
                                 unsigned threads) {
    CvEvaluator evaluator(spec, train, pair, cfg.cv_folds,
                          derive_seed(cfg.seed, seed_purpose::kFolds), counter);
    if (evaluator.n_slots() != cfg.ind_size)
        raise(Errc::SlotMismatch, "run_ga: ind_size " + std::to_string(cfg.ind_size) +
                                      " does not match " + std::to_string(evaluator.n_slots()) +
                                      " weight slots");
    return run_ga(
        cfg, [&evaluator](std::span<const double> genome) { return evaluator.evaluate_genome(genome); },
        hooks, threads);
}

void write_archive_jsonl(std::span<const ArchiveEntry> archive, std::ostream& out) {
    for (const auto& entry : archive) {
        nlohmann::json j;
        j["id"] = entry.id;
        j["generation"] = entry.generation;
        j["genome"] = entry.genome;
        j["cv_predictive"] = entry.cv_predictive;
        j["cv_fairness"] = entry.cv_fairness;
        out << j.dump() << '\n';
    }
}

} // namespace fairweight
