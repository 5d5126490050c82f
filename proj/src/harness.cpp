#include "fairweight/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairweight/parallel.hpp"
#include "fairweight/reweight.hpp"

namespace fs = std::filesystem;

namespace fairweight {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string zero_pad(std::size_t v, int width) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%0*zu", width, v);
    return buf;
}

EvaluatedPoint score_on_test(const FittedModel& model, const Dataset& test,
                             const std::vector<int>& test_groups, std::size_t n_groups,
                             MetricPair pair) {
    const auto scores = model.predict_scores(test);
    const auto labels = threshold_labels(scores);
    return score_pair(pair, test.target, labels, scores, test_groups, n_groups);
}

} // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::EQ: return "EQ";
        case Method::DW: return "DW";
        default: return "EW";
    }
}

Method method_from_string(const std::string& s) {
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "eq") return Method::EQ;
    if (lower == "dw") return Method::DW;
    if (lower == "ew") return Method::EW;
    raise(Errc::InvalidConfig, "unknown method '" + s + "' (expected eq, dw or ew)");
}

void ExperimentConfig::validate() const {
    schema.validate();
    model.validate();
    if (replicates == 0) raise(Errc::InvalidConfig, "config: replicates must be positive");
    if (evaluation_budget == 0) raise(Errc::InvalidConfig, "config: evaluation_budget must be positive");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        raise(Errc::InvalidConfig, "config: test_fraction must be in (0,1)");
    if (method == Method::EW) {
        if (ga_pop_size < 2) raise(Errc::InvalidConfig, "config: ga_pop_size must be at least 2");
        if (evaluation_budget % ga_pop_size != 0)
            raise(Errc::InvalidConfig, "config: evaluation_budget must be a multiple of ga_pop_size");
        if (cv_folds < 2) raise(Errc::InvalidConfig, "config: cv_folds must be at least 2");
    }
}

std::string ExperimentConfig::to_json_text() const {
    nlohmann::json j;
    j["data_path"] = data_path;
    j["dataset_name"] = dataset_name;
    j["schema"] = nlohmann::json::parse(schema.to_json_text());
    j["method"] = to_string(method);
    j["predictive"] = to_string(metric_pair.predictive);
    j["fairness"] = to_string(metric_pair.fairness);
    j["replicates"] = replicates;
    j["evaluation_budget"] = evaluation_budget;
    j["model"]["kind"] = to_string(model.kind);
    if (model.kind == ModelKind::WeightedLogistic) {
        j["model"]["learning_rate"] = model.logistic.learning_rate;
        j["model"]["iterations"] = model.logistic.iterations;
        j["model"]["l2_penalty"] = model.logistic.l2_penalty;
    } else {
        j["model"]["n_trees"] = model.forest.n_trees;
        j["model"]["max_depth"] = model.forest.max_depth;
        j["model"]["min_leaf_weight"] = model.forest.min_leaf_weight;
        if (model.forest.features_per_split_fraction)
            j["model"]["features_per_split_fraction"] = *model.forest.features_per_split_fraction;
    }
    if (method == Method::EW) {
        j["ga"]["pop_size"] = ga_pop_size;
        j["ga"]["max_gen"] = evaluation_budget / ga_pop_size;
        j["ga"]["crossover_prob"] = crossover_prob;
        j["ga"]["per_gene_mutation_prob"] = per_gene_mutation_prob;
        j["ga"]["mutation_sigma"] = mutation_sigma;
        j["ga"]["cv_folds"] = cv_folds;
    }
    j["test_fraction"] = test_fraction;
    j["undersample_train"] = undersample_train;
    j["master_seed"] = master_seed;
    return j.dump(2);
}

ReplicateResult run_replicate(const ExperimentConfig& cfg, const Dataset& ds,
                              std::size_t replicate_index) {
    const auto start = std::chrono::steady_clock::now();

    const std::uint64_t replicate_seed =
        derive_seed(cfg.master_seed, seed_purpose::kReplicate, replicate_index);

    auto [train, test] =
        train_test_split(ds, cfg.test_fraction, derive_seed(replicate_seed, seed_purpose::kSplit));
    if (cfg.undersample_train)
        train = undersample(train, derive_seed(replicate_seed, seed_purpose::kUndersample));

    const GroupIndex train_index = build_group_index(train);
    const GroupIndex test_index = build_group_index(test);

    EvalCounter counter{0};
    ReplicateResult result;
    result.points.resize(cfg.evaluation_budget);

    if (cfg.method == Method::EW) {
        GAConfig ga;
        ga.pop_size = cfg.ga_pop_size;
        ga.max_gen = cfg.evaluation_budget / cfg.ga_pop_size;
        ga.evaluation_budget = cfg.evaluation_budget;
        ga.ind_size = train_index.n_slots;
        ga.crossover_prob = cfg.crossover_prob;
        ga.per_gene_mutation_prob = cfg.per_gene_mutation_prob;
        ga.mutation_sigma = cfg.mutation_sigma;
        ga.cv_folds = cfg.cv_folds;
        ga.seed = derive_seed(replicate_seed, seed_purpose::kGa);

        // one model seed for the whole replicate
        const ModelSpec spec = cfg.model.with_seed(derive_seed(replicate_seed, seed_purpose::kEwModel));
        result.archive = run_ga(ga, spec, train, cfg.metric_pair, &counter, {}, cfg.threads);

        // retrain every archived genome on the full training part and score
        // it on the held-out test part; these points form the final front
        parallel_for(
            result.archive.size(),
            [&](std::size_t i) {
                SlotWeights sw{result.archive[i].genome};
                const auto weights = expand_and_assign(sw, train, train_index);
                const auto model = fit(spec, train, weights);
                result.points[i] =
                    score_on_test(model, test, test_index.group_of_row, test_index.n_groups,
                                  cfg.metric_pair);
            },
            cfg.threads);
    } else {
        const SlotWeights sw = cfg.method == Method::EQ ? equal_weights(train_index)
                                                        : deterministic_weights(train, train_index);
        const auto weights = expand_and_assign(sw, train, train_index);
        parallel_for(
            cfg.evaluation_budget,
            [&](std::size_t i) {
                counter.fetch_add(1, std::memory_order_relaxed);
                const ModelSpec spec =
                    cfg.model.with_seed(derive_seed(replicate_seed, seed_purpose::kModelEval, i));
                const auto model = fit(spec, train, weights);
                result.points[i] =
                    score_on_test(model, test, test_index.group_of_row, test_index.n_groups,
                                  cfg.metric_pair);
            },
            cfg.threads);
    }

    std::vector<MinPoint> min_points(result.points.size());
    for (std::size_t i = 0; i < result.points.size(); ++i)
        min_points[i] = to_min_point(result.points[i]);
    result.front = pareto_front(min_points);
    result.hypervolume = hypervolume_2d(result.front);
    result.n_evaluations = counter.load();
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

RunResult run_experiment(const ExperimentConfig& cfg, const Dataset& ds) {
    cfg.validate();
    RunResult result;
    result.method = cfg.method;
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
        result.replicate_seeds.push_back(derive_seed(cfg.master_seed, seed_purpose::kReplicate, r));
        result.replicates.push_back(run_replicate(cfg, ds, r));
    }
    if (!cfg.out_dir.empty()) write_run_result(cfg, result);
    return result;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    const Dataset ds = load_csv(cfg.data_path, cfg.schema);
    return run_experiment(cfg, ds);
}

void write_run_result(const ExperimentConfig& cfg, const RunResult& result) {
    const fs::path root(cfg.out_dir);
    fs::create_directories(root / "fronts");
    if (cfg.method == Method::EW) fs::create_directories(root / "archives");

    {
        std::ofstream out(root / "config.json");
        out << cfg.to_json_text() << '\n';
    }
    {
        nlohmann::json manifest;
        manifest["version"] = kVersion;
        manifest["dataset_name"] = cfg.dataset_name;
        manifest["method"] = to_string(cfg.method);
        manifest["metric_pair"] = to_string(cfg.metric_pair);
        manifest["replicates"] = cfg.replicates;
        manifest["evaluation_budget"] = cfg.evaluation_budget;
        manifest["master_seed"] = cfg.master_seed;
        manifest["replicate_seeds"] = result.replicate_seeds;
        std::vector<std::uint64_t> evals;
        std::vector<double> seconds;
        for (const auto& rep : result.replicates) {
            evals.push_back(rep.n_evaluations);
            seconds.push_back(rep.seconds);
        }
        manifest["evaluations_per_replicate"] = evals;
        manifest["seconds_per_replicate"] = seconds;
        std::ofstream out(root / "manifest.json");
        out << manifest.dump(2) << '\n';
    }
    {
        std::ofstream out(root / "hypervolumes.csv");
        out << "replicate,method,hypervolume\n";
        for (std::size_t r = 0; r < result.replicates.size(); ++r)
            out << r << ',' << to_string(cfg.method) << ','
                << fmt_double(result.replicates[r].hypervolume) << '\n';
    }
    for (std::size_t r = 0; r < result.replicates.size(); ++r) {
        std::ofstream out(root / "fronts" / ("front_" + zero_pad(r, 3) + ".csv"));
        out << "replicate,method,e,f\n";
        for (const auto& p : result.replicates[r].front.points)
            out << r << ',' << to_string(cfg.method) << ',' << fmt_double(p.e) << ','
                << fmt_double(p.f) << '\n';
    }
    if (cfg.method == Method::EW) {
        for (std::size_t r = 0; r < result.replicates.size(); ++r) {
            std::ofstream out(root / "archives" / ("archive_" + zero_pad(r, 3) + ".jsonl"));
            write_archive_jsonl(result.replicates[r].archive, out);
        }
    }
}

MethodRun to_method_run(const ExperimentConfig& cfg, const RunResult& result) {
    MethodRun run;
    run.method = result.method;
    run.dataset_name = cfg.dataset_name;
    run.metric_pair_label = to_string(cfg.metric_pair);
    run.replicate_seeds = result.replicate_seeds;
    for (const auto& rep : result.replicates) run.hypervolumes.push_back(rep.hypervolume);
    return run;
}

MethodRun load_method_run(const std::string& dir) {
    const fs::path root(dir);
    std::ifstream manifest_in(root / "manifest.json");
    if (!manifest_in) raise(Errc::IoError, "cannot open " + (root / "manifest.json").string());
    nlohmann::json manifest;
    try {
        manifest_in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::IoError, "bad manifest in " + dir + ": " + e.what());
    }

    MethodRun run;
    run.method = method_from_string(manifest.at("method").get<std::string>());
    run.dataset_name = manifest.value("dataset_name", "");
    run.metric_pair_label = manifest.value("metric_pair", "");
    run.replicate_seeds = manifest.at("replicate_seeds").get<std::vector<std::uint64_t>>();

    std::ifstream hv_in(root / "hypervolumes.csv");
    if (!hv_in) raise(Errc::IoError, "cannot open " + (root / "hypervolumes.csv").string());
    std::string line;
    std::getline(hv_in, line);  // header
    while (std::getline(hv_in, line)) {
        if (line.empty()) continue;
        const auto last_comma = line.rfind(',');
        if (last_comma == std::string::npos)
            raise(Errc::IoError, "bad hypervolumes.csv row in " + dir);
        run.hypervolumes.push_back(std::stod(line.substr(last_comma + 1)));
    }
    if (run.hypervolumes.size() != run.replicate_seeds.size())
        raise(Errc::IoError, "manifest and hypervolumes.csv disagree in " + dir);
    return run;
}

HypervolumeTable build_hypervolume_table(const std::vector<MethodRun>& runs) {
    if (runs.size() != 3)
        raise(Errc::InvalidConfig, "compare: expected results for exactly the 3 methods, got " +
                                       std::to_string(runs.size()));

    const Method order[3] = {Method::EQ, Method::DW, Method::EW};
    std::array<const MethodRun*, 3> by_method{};
    for (const auto& run : runs) {
        for (std::size_t i = 0; i < 3; ++i)
            if (run.method == order[i]) {
                if (by_method[i]) raise(Errc::InvalidConfig, "compare: duplicate method " + to_string(run.method));
                by_method[i] = &run;
            }
    }
    for (std::size_t i = 0; i < 3; ++i)
        if (!by_method[i])
            raise(Errc::InvalidConfig, "compare: missing results for method " + to_string(order[i]));

    for (std::size_t i = 1; i < 3; ++i) {
        if (by_method[i]->replicate_seeds != by_method[0]->replicate_seeds)
            raise(Errc::SeedMismatch,
                  "compare: methods ran with different replicate seeds; pairing is invalid");
        if (by_method[i]->metric_pair_label != by_method[0]->metric_pair_label)
            raise(Errc::InvalidConfig, "compare: methods ran under different metric pairs");
    }

    HypervolumeTable tbl;
    tbl.methods = {"EQ", "DW", "EW"};
    const std::size_t n = by_method[0]->hypervolumes.size();
    tbl.rows.resize(n);
    for (std::size_t r = 0; r < n; ++r)
        tbl.rows[r] = {by_method[0]->hypervolumes[r], by_method[1]->hypervolumes[r],
                       by_method[2]->hypervolumes[r]};
    return tbl;
}

StatReport compare_runs(const std::vector<MethodRun>& runs, double alpha) {
    return compare_methods(build_hypervolume_table(runs), alpha);
}

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

void emit_plots(const std::vector<MethodRun>& runs, const std::string& out_dir) {
    if (runs.empty()) raise(Errc::InvalidConfig, "emit_plots: no runs");
    const fs::path root(out_dir);
    fs::create_directories(root);
    const std::string dataset = runs.front().dataset_name.empty() ? "dataset" : runs.front().dataset_name;

    {
        std::ofstream out(root / ("plot_" + dataset + ".csv"));
        out << "method,replicate,hypervolume\n";
        for (const auto& run : runs)
            for (std::size_t r = 0; r < run.hypervolumes.size(); ++r)
                out << to_string(run.method) << ',' << r << ',' << fmt_double(run.hypervolumes[r])
                    << '\n';
    }

    // strip plot: one column per method, jittered points, a median bar
    const double width = 480, height = 320;
    const double ml = 64, mr = 24, mt = 36, mb = 44;
    double lo = 1e300, hi = -1e300;
    for (const auto& run : runs)
        for (double v : run.hypervolumes) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.06 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto y_of = [&](double v) { return mt + (height - mt - mb) * (1.0 - (v - lo) / (hi - lo)); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << dataset << "</text>\n";
    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"16\" y=\"" << height / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"11\" transform=\"rotate(-90 16 " << height / 2 << ")\">hypervolume</text>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        const double y = y_of(v);
        svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << y << "\" x2=\"" << ml << "\" y2=\"" << y
            << "\" stroke=\"black\"/>\n";
        char label[32];
        std::snprintf(label, sizeof(label), "%.3f", v);
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << label
            << "</text>\n";
    }

    const char* colors[3] = {"#4477aa", "#ee6677", "#228833"};
    Rng jitter(derive_seed(0, seed_purpose::kJitter));
    const double span = (width - ml - mr) / static_cast<double>(runs.size());
    for (std::size_t m = 0; m < runs.size(); ++m) {
        const double cx = ml + span * (static_cast<double>(m) + 0.5);
        for (double v : runs[m].hypervolumes) {
            const double x = cx + jitter.real(-0.18, 0.18) * span;
            svg << "<circle cx=\"" << x << "\" cy=\"" << y_of(v) << "\" r=\"3\" fill=\""
                << colors[m % 3] << "\" fill-opacity=\"0.65\"/>\n";
        }
        const double med_y = y_of(median_of(runs[m].hypervolumes));
        svg << "<line x1=\"" << cx - 0.28 * span << "\" y1=\"" << med_y << "\" x2=\""
            << cx + 0.28 * span << "\" y2=\"" << med_y << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << cx << "\" y=\"" << height - mb + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << to_string(runs[m].method) << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(root / ("plot_" + dataset + ".svg"));
    out << svg.str();
}

} // namespace fairweight
