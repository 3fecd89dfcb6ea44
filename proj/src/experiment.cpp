#include "seqtune/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "seqtune/csv.hpp"
#include "seqtune/rng.hpp"

namespace seqtune {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key))
            throw std::runtime_error("config: unknown key '" + key + "' in " + where);
    }
}

TaskSpec parse_task(const json& j) {
    reject_unknown_keys(j, {"csv", "target", "kind", "synthetic", "n", "p", "noise"}, "task");
    TaskSpec t;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "classification")
        t.kind = TaskKind::classification;
    else if (kind == "regression")
        t.kind = TaskKind::regression;
    else
        throw std::runtime_error("config: task.kind must be classification or regression");

    if (j.contains("csv")) {
        if (j.contains("synthetic")) throw std::runtime_error("config: task has both csv and synthetic");
        t.csv_path = j.at("csv").get<std::string>();
        t.target = j.at("target").get<std::string>();
    } else if (j.contains("synthetic")) {
        const std::string s = j.at("synthetic").get<std::string>();
        if (s == "linear-regression")
            t.synthetic = SyntheticKind::linear_regression;
        else if (s == "two-gaussians-classification")
            t.synthetic = SyntheticKind::two_gaussians_classification;
        else
            throw std::runtime_error("config: unknown synthetic task '" + s + "'");
        t.n = j.at("n").get<std::size_t>();
        t.p = j.at("p").get<std::size_t>();
        t.noise = j.value("noise", 0.0);
    } else {
        throw std::runtime_error("config: task needs csv or synthetic");
    }
    return t;
}

ParamSpace parse_space(const json& j) {
    std::vector<ParamDef> defs;
    for (const auto& pj : j) {
        reject_unknown_keys(pj, {"name", "kind", "lo", "hi", "values"}, "space entry");
        const std::string name = pj.at("name").get<std::string>();
        const std::string kind = pj.at("kind").get<std::string>();
        if (kind == "continuous")
            defs.push_back(ParamDef::make_continuous(name, pj.at("lo").get<double>(),
                                                     pj.at("hi").get<double>()));
        else if (kind == "integer")
            defs.push_back(ParamDef::make_integer(name, pj.at("lo").get<std::int64_t>(),
                                                  pj.at("hi").get<std::int64_t>()));
        else if (kind == "log2")
            defs.push_back(ParamDef::make_log2(name, pj.at("lo").get<double>(),
                                               pj.at("hi").get<double>()));
        else if (kind == "categorical")
            defs.push_back(ParamDef::make_categorical(
                name, pj.at("values").get<std::vector<std::string>>()));
        else
            throw std::runtime_error("config: unknown space kind '" + kind + "'");
    }
    return ParamSpace(defs);
}

TuningSpec parse_tuning(const json& j) {
    reject_unknown_keys(
        j, {"K", "n_configs", "settings", "slrt", "shift", "log_transform", "replications"},
        "tuning");
    TuningSpec t;
    t.K = j.value("K", 10);
    t.n_configs = j.value("n_configs", 50);
    if (j.contains("settings")) t.settings = j.at("settings").get<std::vector<std::string>>();
    if (j.contains("slrt")) {
        const auto& sj = j.at("slrt");
        reject_unknown_keys(sj, {"gamma0", "gamma1", "alpha", "beta", "n_min"}, "tuning.slrt");
        SlrtConfig s;
        s.gamma0 = sj.at("gamma0").get<double>();
        s.gamma1 = sj.at("gamma1").get<double>();
        s.alpha = sj.at("alpha").get<double>();
        s.beta = sj.at("beta").get<double>();
        s.n_min = sj.value("n_min", 2);
        s.n_max = t.K;
        s.validate();
        t.explicit_slrt = s;
    }
    if (j.contains("shift")) t.shift = j.at("shift").get<double>();
    if (j.contains("log_transform")) t.log_transform = j.at("log_transform").get<bool>();
    t.replications = j.value("replications", 100);
    if (t.K < 2) throw std::runtime_error("config: tuning.K must be >= 2");
    if (t.n_configs < 1) throw std::runtime_error("config: tuning.n_configs must be >= 1");
    for (const auto& s : t.settings) setting_by_label(s);
    return t;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config: " + std::string(e.what()));
    }

    reject_unknown_keys(j, {"task", "learner", "space", "tuning", "diststudy", "seed", "out"},
                        "config root");
    ExperimentConfig cfg;
    cfg.task = parse_task(j.at("task"));
    cfg.learner = learner_from_string(j.at("learner").get<std::string>());
    cfg.space = j.contains("space") ? parse_space(j.at("space")) : default_space(cfg.learner);
    if (j.contains("tuning")) cfg.tuning = parse_tuning(j.at("tuning"));
    if (j.contains("diststudy")) {
        const auto& dj = j.at("diststudy");
        reject_unknown_keys(dj, {"n_configs", "n_boot"}, "diststudy");
        cfg.diststudy.n_configs = dj.value("n_configs", 10);
        cfg.diststudy.n_boot = dj.value("n_boot", 200);
    }
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.out_dir = j.value("out", std::string("results"));

    // keep CSV paths usable no matter where the binary runs
    const auto dir = std::filesystem::path(path).parent_path();
    if (!cfg.task.csv_path.empty() && !dir.empty() &&
        std::filesystem::path(cfg.task.csv_path).is_relative())
        cfg.task.csv_path = (dir / cfg.task.csv_path).string();
    return cfg;
}

Dataset load_task(const ExperimentConfig& cfg) {
    if (cfg.task.synthetic)
        return make_synthetic(*cfg.task.synthetic, cfg.task.n, cfg.task.p, cfg.task.noise,
                              derive_seed(cfg.seed, "dataset"));
    CsvSchema schema;
    schema.target = cfg.task.target;
    schema.task = cfg.task.kind;
    return load_csv(cfg.task.csv_path, schema);
}

namespace {

std::string ensure_out_dir(const ExperimentConfig& cfg, const std::string& override_dir) {
    const std::string dir = override_dir.empty() ? cfg.out_dir : override_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

json config_to_json(const Config& c) {
    json j;
    j["id"] = c.id;
    for (const auto& [name, value] : c.values) {
        if (const auto* p = std::get_if<double>(&value))
            j[name] = *p;
        else if (const auto* p = std::get_if<std::int64_t>(&value))
            j[name] = *p;
        else
            j[name] = std::get<std::string>(value);
    }
    return j;
}

}  // namespace

int cmd_diststudy(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    const std::string dir = ensure_out_dir(cfg, out_dir);
    const Dataset ds = load_task(cfg);
    const auto rows = dist_study(ds, cfg.learner, cfg.space, cfg.diststudy.n_configs,
                                 cfg.diststudy.n_boot, cfg.seed, jobs);
    write_dist_study_csv(rows, dir + "/diststudy.csv");

    const auto summary = dist_study_summary(rows);
    CsvWriter w(dir + "/diststudy_summary.csv");
    w.row({"rank", "family", "median_cvm"});
    for (std::size_t i = 0; i < summary.size(); ++i)
        w.row({std::to_string(i + 1), to_string(summary[i].first),
               format_double(summary[i].second)});

    std::cout << "diststudy: " << rows.size() << " fits over " << cfg.diststudy.n_configs
              << " configs x " << cfg.diststudy.n_boot << " bootstrap losses\n";
    for (const auto& [fam, med] : summary)
        std::cout << "  " << to_string(fam) << " median CvM " << format_double(med) << "\n";
    return 0;
}

int cmd_tune(const ExperimentConfig& cfg, const std::string& algorithm, const std::string& out_dir,
             int jobs) {
    if (algorithm != "rs" && algorithm != "sqrs")
        throw std::runtime_error("tune: algorithm must be rs or sqrs");
    const std::string dir = ensure_out_dir(cfg, out_dir);
    const Dataset ds = load_task(cfg);
    const auto inst = ResamplingInstance::bootstrap(static_cast<int>(ds.n), cfg.tuning.K,
                                                    derive_seed(cfg.seed, "instance"));
    EvalCache cache;
    Rng cfg_rng(derive_seed(cfg.seed, "configs"));

    json result;
    result["algorithm"] = algorithm;
    result["seed"] = cfg.seed;

    if (algorithm == "rs") {
        const RsResult rs =
            random_search(cfg.space, cfg.learner, ds, inst, cfg.tuning.n_configs, cfg_rng, cache, jobs);
        result["winner"] = config_to_json(rs.best());
        result["mean_loss"] = rs.best_mean;
        result["fits"] = rs.fits;
        std::cout << "rs winner: config " << rs.best().id << ", mean loss "
                  << format_double(rs.best_mean) << ", fits " << rs.fits << "\n";
    } else {
        std::vector<Config> candidates;
        candidates.reserve(static_cast<std::size_t>(cfg.tuning.n_configs));
        for (int i = 0; i < cfg.tuning.n_configs; ++i)
            candidates.push_back(sample_config(cfg.space, cfg_rng, i));

        SqrsOptions sopts;
        if (cfg.tuning.explicit_slrt) {
            sopts.slrt = *cfg.tuning.explicit_slrt;
        } else {
            const SlrtSetting& st = setting_by_label(cfg.tuning.settings.at(0));
            sopts.slrt = SlrtConfig{st.gamma0, st.gamma1, st.alpha_beta, st.alpha_beta, 2,
                                    cfg.tuning.K};
        }
        sopts.slrt.n_max = cfg.tuning.K;
        sopts.shift = cfg.tuning.shift.value_or(default_shift(ds.task));
        sopts.log_transform = cfg.tuning.log_transform.value_or(default_log_transform(ds.task));
        sopts.reference_budget = static_cast<long>(cfg.tuning.n_configs) * cfg.tuning.K;

        const SqrsResult sq = sqrs(candidates, cfg.learner, ds, inst, sopts, cache);

        const long fits_before_report = cache.fits_performed();
        double mean = 0.0;
        for (int k = 0; k < cfg.tuning.K; ++k)
            mean += evaluate(sq.incumbent, cfg.learner, ds, inst, k, cache);
        mean /= static_cast<double>(cfg.tuning.K);

        result["winner"] = config_to_json(sq.incumbent);
        result["mean_loss"] = mean;
        result["fits"] = sq.fits;
        result["eval_ratio"] = sq.eval_ratio;
        result["shift"] = sopts.shift;
        result["log_transform"] = sopts.log_transform;
        result["report_only_fits"] = cache.fits_performed() - fits_before_report;
        write_duel_log_csv(sq, dir + "/decision_log.csv");
        std::cout << "sqrs winner: config " << sq.incumbent.id << ", mean loss "
                  << format_double(mean) << ", fits " << sq.fits << " (eval ratio "
                  << format_double(sq.eval_ratio) << ")\n";
    }

    cache.export_csv(dir + "/evaluations.csv");
    std::ofstream out(dir + "/result.json");
    out << result.dump(2) << "\n";
    return 0;
}

int cmd_compare(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    const std::string dir = ensure_out_dir(cfg, out_dir);
    const Dataset ds = load_task(cfg);

    PairedOptions popts;
    popts.K = cfg.tuning.K;
    popts.n_configs = cfg.tuning.n_configs;
    popts.settings = cfg.tuning.settings;
    popts.shift = cfg.tuning.shift;
    popts.log_transform = cfg.tuning.log_transform;
    popts.replications = cfg.tuning.replications;
    popts.seed = cfg.seed;
    popts.jobs = jobs;

    const auto reports = paired_compare(cfg.space, cfg.learner, ds, popts);
    const auto agg = aggregate_reports(reports, popts.settings);
    write_reports_csv(reports, dir + "/paired_reports.csv");
    write_aggregate_csv(agg, dir + "/aggregate.csv");

    std::cout << "compare: " << popts.replications << " replications, " << popts.n_configs
              << " configs x " << popts.K << " partitions\n";
    for (const auto& a : agg)
        std::cout << "  setting " << a.setting << ": identical " << format_double(a.prop_identical)
                  << ", median eval ratio " << format_double(a.median_eval_ratio) << "\n";
    return 0;
}

}  // namespace seqtune
