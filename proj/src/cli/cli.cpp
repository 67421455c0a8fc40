#include "conpredict/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include "CLI11.hpp"
#include "conpredict/cli/pipeline.hpp"
#include "conpredict/common/error.hpp"
#include "conpredict/common/rng.hpp"
#include "conpredict/learn/synth.hpp"
#include "conpredict/minicc/parser.hpp"

namespace conpredict::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
    if (!out) throw InputError("failed writing " + path);
}

std::string table_text(const csv::Table& t) {
    std::ostringstream out;
    csv::write(out, t);
    return out.str();
}

/// A single table to a file or stdout.
void emit(const csv::Table& t, const std::string& path) { write_text(path, table_text(t)); }

/// One of several named tables: `<dir>/<name>.csv`, or a `# name` section on stdout.
void emit_named(const std::string& dir, const std::string& name, const csv::Table& t) {
    if (dir.empty()) {
        std::cout << "# " << name << "\n" << table_text(t) << "\n";
        return;
    }
    fs::create_directories(dir);
    csv::write_file((fs::path(dir) / (name + ".csv")).string(), t);
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

struct ModelFlags {
    std::string classifier = "rf";
    int trees = 100;
    int min_leaf = 2;

    void add(CLI::App* app) {
        app->add_option("--classifier", classifier, "nb, lr, dt or rf")->capture_default_str();
        app->add_option("--trees", trees, "random forest size")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--min-leaf", min_leaf, "minimum rows per leaf")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }

    learn::ClassifierSpec spec() const {
        learn::ClassifierSpec s;
        s.kind = learn::classifier_from_name(classifier);
        s.trees = trees;
        s.min_leaf = min_leaf;
        return s;
    }
};

struct StudyFlags {
    ModelFlags model;
    int folds = 10;
    int repeats = 10;
    int smote = 100;
    int smote_k = 5;
    bool no_select = false;
    int select_trees = learn::SelectionOptions{}.forest_trees;
    int select_folds = 5;
    int stale_limit = 5;
    int threads = 0;

    void add(CLI::App* app, bool cv = true) {
        model.add(app);
        if (cv) {
            app->add_option("--folds", folds, "cross-validation folds")->check(CLI::Range(2, 1000))->capture_default_str();
            app->add_option("--repeats", repeats, "cross-validation repeats")
                ->check(CLI::PositiveNumber)
                ->capture_default_str();
            app->add_option("--threads", threads, "worker threads (0: all cores)")
                ->check(CLI::NonNegativeNumber)
                ->capture_default_str();
        }
        app->add_option("--smote", smote, "SMOTE percent on training rows")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        app->add_option("--smote-k", smote_k, "SMOTE neighbors")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_flag("--no-select", no_select, "skip wrapper feature selection");
        app->add_option("--select-trees", select_trees, "forest size while scoring subsets (0: --trees)")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        app->add_option("--select-folds", select_folds, "internal folds of the wrapper")
            ->check(CLI::Range(2, 1000))
            ->capture_default_str();
        app->add_option("--stale-limit", stale_limit, "non-improving expansions before the search stops")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }

    learn::SelectionOptions selection() const {
        learn::SelectionOptions o;
        o.folds = select_folds;
        o.stale_limit = stale_limit;
        o.forest_trees = select_trees;
        return o;
    }

    StudyOptions options() const {
        StudyOptions o;
        o.spec = model.spec();
        o.cv.folds = folds;
        o.cv.repeats = repeats;
        o.cv.smote_percent = smote;
        o.cv.smote_k = smote_k;
        o.cv.select = !no_select;
        o.cv.selection = selection();
        o.cv.threads = threads;
        return o;
    }
};

struct FeatureFlags {
    std::string features = "conpredictor";
    bool sequential = false;

    void add(CLI::App* app) {
        auto* f = app->add_option("--features", features, "conpredictor, spm or all")->capture_default_str();
        app->add_flag("--sequential-baseline", sequential, "use the sequential baseline (spm) features")->excludes(f);
    }

    learn::FeatureSet set() const { return sequential ? learn::FeatureSet::Spm : learn::feature_set_from_name(features); }
};

std::string set_name(learn::FeatureSet s) {
    switch (s) {
        case learn::FeatureSet::ConPredictor: return "conpredictor";
        case learn::FeatureSet::Spm: return "spm";
        case learn::FeatureSet::All: return "all";
    }
    return "?";
}

// ---------------------------------------------------------------------------

struct ProgramArtifacts {
    std::string program;
    minicc::SourceUnit unit;
    std::vector<mutation::Mutant> mutants;
    std::vector<exec::TestCase> tests;
};

exec::KillMatrix kill_matrix(const ProgramArtifacts& a, int seeds, std::int64_t step_limit, std::uint64_t seed) {
    exec::ExecOptions o;
    o.step_limit = step_limit;
    return exec::build_kill_matrix(a.unit, a.mutants, a.tests, seeds, o, seed);
}

// ---------------------------------------------------------------------------

int cmd_parse(const std::string& input, const std::string& output) {
    const auto u = minicc::parse_file(input);
    std::string text;
    for (const auto& f : u.functions) text += function_document(f).dump() + "\n";
    write_text(output, text);
    return 0;
}

int cmd_ccfg(const std::string& input, const std::string& output) {
    const auto c = ccfg::build_ccfg(minicc::parse_file(input));
    for (const auto& d : c.diagnostics) warn(d);
    write_text(output, ccfg::dump_ccfg(c));
    return 0;
}

int cmd_metrics(const std::string& input, std::optional<int> node_weight, const std::string& output) {
    const std::string program = program_name(input);
    if (fs::path(input).extension() == ".ccfg") {
        emit(ccfg_metric_table(program, ccfg::load_ccfg_file(input), node_weight), output);
    } else {
        emit(static_metric_table(program, minicc::parse_file(input), node_weight), output);
    }
    return 0;
}

int cmd_mutate(const std::string& input, const std::string& ops, const std::string& function,
               const mutation::MutationOptions& options, const std::string& out_dir) {
    const auto u = minicc::parse_file(input);
    mutation::EnumerationReport report;
    const auto op_list = mutation::parse_operator_list(ops);
    for (auto op : op_list) mutation::enumerate_sites(u, op, options, op == mutation::Operator::Rmlock ? &report : nullptr);
    for (const auto& s : report.unmatched) warn("rmlock skipped unmatched " + s);
    const auto mutants = mutation::generate_mutants(
        u, op_list, options, function.empty() ? std::nullopt : std::optional<std::string>(function));
    fs::create_directories(out_dir);
    std::vector<std::string> files;
    for (const auto& m : mutants) {
        files.push_back(mutation::mutant_file_name(m));
        write_text((fs::path(out_dir) / files.back()).string(), m.source);
    }
    write_text((fs::path(out_dir) / "manifest.json").string(), mutation::manifest_json(mutants, files));
    csv::write_file((fs::path(out_dir) / "mus.csv").string(), mus_table(program_name(input), u, mutants));
    std::cerr << mutants.size() << " mutants written to " << out_dir << "\n";
    return 0;
}

struct ExecFlags {
    std::string input;
    std::string tests;
    std::string mutants;
    std::string ops = "all";
    int seeds = 100;
    std::int64_t step_limit = 100000;
    int exhaustive = 0;
    std::string out_dir;
};

int cmd_exec(const ExecFlags& f, std::uint64_t seed) {
    ProgramArtifacts a;
    a.program = program_name(f.input);
    a.unit = minicc::parse_file(f.input);
    a.tests = f.tests.empty() ? tests_for(f.input) : exec::load_tests(f.tests);
    exec::ExecOptions o;
    o.step_limit = f.step_limit;
    if (f.exhaustive > 0) {
        const exec::Program p(a.unit);
        csv::Table summary, outcomes;
        summary.header = {"test", "schedules", "max_branch_points", "complete", "deadlock"};
        outcomes.header = {"test", "observable"};
        for (const auto& t : a.tests) {
            const auto e = exec::explore_exhaustive(p, t, f.exhaustive, o);
            summary.rows.push_back({t.id, std::to_string(e.schedules), std::to_string(e.max_branch_points),
                                    e.complete ? "1" : "0", e.deadlock ? "1" : "0"});
            for (const auto& obs : e.observables) outcomes.rows.push_back({t.id, obs});
        }
        emit_named(f.out_dir, "exploration", summary);
        emit_named(f.out_dir, "observables", outcomes);
        return 0;
    }
    a.mutants = f.mutants.empty() ? mutation::generate_mutants(a.unit, mutation::parse_operator_list(f.ops))
                                  : mutation::load_manifest(f.mutants);
    const auto km = kill_matrix(a, f.seeds, f.step_limit, seed);
    emit_named(f.out_dir, "kill_matrix", kill_table(km));
    emit_named(f.out_dir, "dynamic", dynamic_table(a.program, a.unit, a.mutants, km));
    std::cerr << "mutation score " << csv::format_number(km.mutation_score()) << "\n";
    return 0;
}

int cmd_assemble(const std::vector<std::string>& metric_files, const std::string& labels, learn::FeatureSet set,
                 const std::string& output) {
    std::vector<csv::Table> tables;
    for (const auto& p : metric_files) tables.push_back(csv::read_file(p));
    const auto d = learn::assemble(merge_tables(tables), csv::read_file(labels), set);
    emit(learn::to_table(d), output);
    std::cerr << d.rows() << " rows, " << d.positives() << " faulty, " << d.features.size() << " features\n";
    return 0;
}

learn::Dataset load_for(const std::string& path, learn::FeatureSet set) {
    return learn::select_feature_set(learn::read_dataset(path), set);
}

int cmd_train(const std::string& input, const FeatureFlags& ff, const StudyFlags& sf, std::uint64_t seed,
              const std::string& output) {
    const auto d = load_for(input, ff.set());
    d.require_two_classes("training");
    const auto spec = sf.model.spec();
    const auto sm = learn::smote(d, sf.smote, sf.smote_k, derive_seed(seed, 1));
    std::vector<std::size_t> columns(d.features.size());
    std::iota(columns.begin(), columns.end(), 0);
    if (!sf.no_select) {
        auto chosen = learn::wrapper_select(sm.data, spec, derive_seed(seed, 2), sf.selection()).columns;
        if (!chosen.empty()) columns = chosen;
    }
    auto model = learn::train(sm.data, spec, columns, derive_seed(seed, 3));
    write_text(output, learn::save_model(model) + "\n");
    return 0;
}

int cmd_evaluate(const std::string& input, const std::string& model_path, bool compare, const FeatureFlags& ff,
                 const StudyFlags& sf, std::uint64_t seed, const std::string& out_dir, const std::string& curves) {
    const std::string subject = program_name(input);
    const auto full = learn::read_dataset(input);
    std::vector<Study> studies;
    std::vector<learn::Dataset> datasets;
    if (!model_path.empty()) {
        std::ifstream in(model_path);
        if (!in) throw InputError("cannot read " + model_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const auto model = learn::bind_model(learn::load_model(buf.str()), full);
        const auto prob = model.predict_proba(full);
        Study s;
        s.technique = std::string(learn::classifier_name(model.kind));
        s.repeats.push_back(stats::evaluate(prob, full.y, full.nloc, full.bugs));
        s.mean_probability = prob;
        studies.push_back(std::move(s));
        datasets.push_back(full);
    } else {
        std::vector<learn::FeatureSet> sets{ff.set()};
        if (compare) sets = {learn::FeatureSet::ConPredictor, learn::FeatureSet::Spm};
        for (auto set : sets) {
            datasets.push_back(learn::select_feature_set(full, set));
            studies.push_back(run_study(datasets.back(), set_name(set), sf.options(), seed));
        }
    }
    emit_named(out_dir, "report", report_table(subject, studies));
    if (compare) emit_named(out_dir, "comparison", comparison_table(studies[0], studies[1]));
    if (!curves.empty()) {
        for (std::size_t i = 0; i < studies.size(); ++i) {
            const auto& d = datasets[i];
            emit_named(curves, "roc_" + studies[i].technique, roc_table(studies[i].mean_probability, d.y));
            emit_named(curves, "effort_" + studies[i].technique,
                       effort_table(studies[i].mean_probability, d.nloc, d.bugs));
        }
    }
    return 0;
}

int cmd_rank(const std::string& input, const FeatureFlags& ff, const StudyFlags& sf, int runs, double alpha,
             double effect_alpha, std::uint64_t seed, const std::string& out_dir) {
    const auto d = load_for(input, ff.set());
    d.require_two_classes("ranking");
    auto spec = sf.model.spec();
    spec.kind = learn::ClassifierKind::RandomForest;
    const auto imp = stats::importance_runs(d, spec, runs, sf.smote, sf.smote_k, seed);
    emit_named(out_dir, "table9", scott_knott_table(stats::scott_knott(imp, alpha)));
    std::vector<stats::FeatureEffect> effects;
    for (const auto& f : d.features) effects.push_back(stats::feature_effect(d, f, effect_alpha));
    emit_named(out_dir, "table10", effect_table(effects));
    return 0;
}

int cmd_synth(const learn::SynthSpec& spec, const std::string& output, std::string metadata) {
    const auto s = learn::synth(spec);
    emit(learn::to_table(s.data), output);
    if (metadata.empty() && !output.empty() && output != "-")
        metadata = fs::path(output).replace_extension(".json").string();
    if (!metadata.empty()) write_text(metadata, s.metadata().dump(2) + "\n");
    return 0;
}

int cmd_pipeline(const std::string& corpus, const std::string& labels, const FeatureFlags& ff, const StudyFlags& sf,
                 bool compare, int seeds, std::int64_t step_limit, std::uint64_t seed, const std::string& out_dir) {
    if (!fs::is_directory(corpus)) throw InputError(corpus + " is not a directory");
    std::vector<std::string> sources;
    for (const auto& e : fs::directory_iterator(corpus))
        if (e.is_regular_file() && e.path().extension() == ".mcc") sources.push_back(e.path().string());
    std::sort(sources.begin(), sources.end());
    if (sources.empty()) throw InputError("no .mcc files in " + corpus);

    std::vector<csv::Table> static_tables, mus_tables, dyn_tables;
    for (const auto& path : sources) {
        ProgramArtifacts a;
        a.program = program_name(path);
        a.unit = minicc::parse_file(path);
        a.tests = tests_for(path);
        a.mutants = mutation::generate_mutants(a.unit, {mutation::kAllOperators.begin(), mutation::kAllOperators.end()});
        static_tables.push_back(static_metric_table(a.program, a.unit));
        mus_tables.push_back(mus_table(a.program, a.unit, a.mutants));
        dyn_tables.push_back(dynamic_table(a.program, a.unit, a.mutants, kill_matrix(a, seeds, step_limit, seed)));
        std::cerr << a.program << ": " << a.unit.functions.size() << " functions, " << a.mutants.size()
                  << " mutants\n";
    }
    const auto metrics_table = merge_tables(static_tables).front();
    const auto mus = merge_tables(mus_tables).front();
    const auto dyn = merge_tables(dyn_tables).front();
    const auto label_table = csv::read_file(labels);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        csv::write_file((fs::path(out_dir) / "metrics.csv").string(), metrics_table);
        csv::write_file((fs::path(out_dir) / "mus.csv").string(), mus);
        csv::write_file((fs::path(out_dir) / "dynamic.csv").string(), dyn);
    }
    const auto all = learn::assemble({metrics_table, mus, dyn}, label_table, learn::FeatureSet::All);
    if (!out_dir.empty()) learn::write_dataset((fs::path(out_dir) / "dataset.csv").string(), all);

    std::vector<learn::FeatureSet> sets{ff.set()};
    if (compare) sets = {learn::FeatureSet::ConPredictor, learn::FeatureSet::Spm};
    std::vector<Study> studies;
    for (auto set : sets)
        studies.push_back(run_study(learn::select_feature_set(all, set), set_name(set), sf.options(), seed));
    const std::string subject = fs::path(corpus).filename().empty() ? fs::path(corpus).parent_path().filename().string()
                                                                     : fs::path(corpus).filename().string();
    emit_named(out_dir, "report", report_table(subject, studies));
    if (compare) emit_named(out_dir, "comparison", comparison_table(studies[0], studies[1]));
    return 0;
}

int run_app(int argc, char** argv) {
    CLI::App app{"Concurrency bug prediction toolchain for MiniCC programs"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "read flags from a TOML/INI file (flags on the command line win)");
    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "seed for every random choice")->envname("CONPREDICT_SEED")->capture_default_str();

    std::string input, output, out_dir;

    auto* parse = app.add_subcommand("parse", "print the AST and CFG of each function as JSON lines");
    parse->add_option("source", input, ".mcc file")->required()->check(CLI::ExistingFile);
    parse->add_option("-o,--output", output, "output file (default stdout)");

    auto* ccfg_cmd = app.add_subcommand("ccfg", "build the concurrency control flow graph");
    ccfg_cmd->add_option("source", input, ".mcc file")->required()->check(CLI::ExistingFile);
    ccfg_cmd->add_option("-o,--output", output, "output .ccfg file (default stdout)");

    std::optional<int> node_weight;
    auto* metrics_cmd = app.add_subcommand("metrics", "static metrics per function of a .mcc or .ccfg file");
    metrics_cmd->add_option("input", input, ".mcc or .ccfg file")->required()->check(CLI::ExistingFile);
    metrics_cmd->add_option("--node-weight", node_weight, "instruction weight of every node (SVD)")
        ->check(CLI::PositiveNumber);
    metrics_cmd->add_option("-o,--output", output, "output CSV (default stdout)");

    std::string ops = "all", function;
    mutation::MutationOptions mopts;
    auto* mutate = app.add_subcommand("mutate", "generate mutants, a manifest and MuS counts");
    mutate->add_option("source", input, ".mcc file")->required()->check(CLI::ExistingFile);
    mutate->add_option("--ops", ops, "operators: names, all, seq or con")->capture_default_str();
    mutate->add_option("--function", function, "only mutate this function");
    mutate->add_option("--out-dir", out_dir, "directory for mutants, manifest.json and mus.csv")->required();
    mutate->add_flag("--oeba-and", mopts.oeba_and, "oeba also emits &=");
    mutate->add_flag("--rmlock-single", mopts.rmlock_single, "rmlock removes single calls");

    ExecFlags ef;
    auto* exec_cmd = app.add_subcommand("exec", "run tests on mutants (kill matrix, MuDuE/MuDuK) or explore schedules");
    exec_cmd->add_option("source", ef.input, ".mcc file")->required()->check(CLI::ExistingFile);
    exec_cmd->add_option("--tests", ef.tests, "test manifest (default <source>.tests, else main)")
        ->check(CLI::ExistingFile);
    auto* mutants_opt =
        exec_cmd->add_option("--mutants", ef.mutants, "manifest written by mutate")->check(CLI::ExistingFile);
    exec_cmd->add_option("--ops", ef.ops, "operators to generate when no manifest is given")
        ->capture_default_str()
        ->excludes(mutants_opt);
    exec_cmd->add_option("--seeds", ef.seeds, "runs per (mutant, test)")->check(CLI::PositiveNumber)->capture_default_str();
    exec_cmd->add_option("--step-limit", ef.step_limit, "steps per run")->check(CLI::PositiveNumber)->capture_default_str();
    exec_cmd->add_option("--exhaustive", ef.exhaustive, "enumerate every schedule of the original up to this many events")
        ->check(CLI::PositiveNumber)
        ->excludes(mutants_opt);
    exec_cmd->add_option("--out-dir", ef.out_dir, "directory for the CSV tables (default stdout)");

    std::vector<std::string> metric_files;
    std::string labels;
    FeatureFlags ff;
    auto* assemble = app.add_subcommand("assemble", "join metric tables and labels into a dataset");
    assemble->add_option("--metrics", metric_files, "metric CSV tables")->required()->check(CLI::ExistingFile);
    assemble->add_option("--labels", labels, "program,function,label[,bugs] CSV")->required()->check(CLI::ExistingFile);
    ff.add(assemble);
    assemble->add_option("-o,--output", output, "dataset CSV (default stdout)");

    StudyFlags sf;
    auto* train = app.add_subcommand("train", "SMOTE, select features and fit a model");
    train->add_option("dataset", input, "dataset CSV")->required()->check(CLI::ExistingFile);
    ff.add(train);
    sf.add(train, false);
    train->add_option("-o,--output", output, "model JSON (default stdout)");

    std::string model_path, curves;
    bool compare = false;
    auto* evaluate = app.add_subcommand("evaluate", "repeated cross-validation, or scoring with a saved model");
    evaluate->add_option("dataset", input, "dataset CSV")->required()->check(CLI::ExistingFile);
    ff.add(evaluate);
    sf.add(evaluate);
    auto* model_opt = evaluate->add_option("--model", model_path, "score with a saved model instead")
                          ->check(CLI::ExistingFile);
    evaluate->add_flag("--compare", compare, "conpredictor against spm, with Wilcoxon and Cliff's delta")
        ->excludes(model_opt);
    evaluate->add_option("--out-dir", out_dir, "directory for report.csv and comparison.csv (default stdout)");
    evaluate->add_option("--curves", curves, "directory for ROC and effort curve dumps");

    int runs = 10;
    double alpha = 0.05, effect_alpha = 0.01;
    auto* rank = app.add_subcommand("rank", "permutation importance with Scott-Knott groups, and feature effects");
    rank->add_option("dataset", input, "dataset CSV")->required()->check(CLI::ExistingFile);
    ff.add(rank);
    sf.model.add(rank);
    rank->add_option("--smote", sf.smote, "SMOTE percent")->check(CLI::NonNegativeNumber)->capture_default_str();
    rank->add_option("--smote-k", sf.smote_k, "SMOTE neighbors")->check(CLI::PositiveNumber)->capture_default_str();
    rank->add_option("--runs", runs, "importance runs")->check(CLI::Range(2, 100000))->capture_default_str();
    rank->add_option("--alpha", alpha, "Scott-Knott significance")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    rank->add_option("--effect-alpha", effect_alpha, "feature effect significance")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    rank->add_option("--out-dir", out_dir, "directory for table9.csv and table10.csv (default stdout)");

    learn::SynthSpec ss;
    std::string metadata;
    auto* synth = app.add_subcommand("synth", "generate a labeled dataset with planted concurrency signal");
    synth->add_option("--n", ss.n, "rows")->check(CLI::Range(2, 100000000))->capture_default_str();
    synth->add_option("--faulty", ss.faulty, "faulty fraction in (0,1)")->capture_default_str();
    synth->add_option("--concurrency-signal", ss.concurrency_signal, "shift on planted concurrency columns")
        ->capture_default_str();
    synth->add_option("--sequential-signal", ss.sequential_signal, "shift on planted sequential columns")
        ->capture_default_str();
    synth->add_option("--noise", ss.noise, "noise standard deviation")->capture_default_str();
    synth->add_option("-o,--output", output, "dataset CSV (default stdout)");
    synth->add_option("--metadata", metadata, "ground-truth JSON (default <output>.json)");

    int seeds = 100;
    std::int64_t step_limit = 100000;
    std::string corpus;
    auto* pipeline = app.add_subcommand("pipeline", "metrics, mutation, execution, assembly and evaluation of a corpus");
    pipeline->add_option("corpus", corpus, "directory of .mcc files (and .tests manifests)")->required();
    pipeline->add_option("labels", labels, "program,function,label[,bugs] CSV")->required()->check(CLI::ExistingFile);
    ff.add(pipeline);
    sf.add(pipeline);
    pipeline->add_option("--seeds", seeds, "runs per (mutant, test)")->check(CLI::PositiveNumber)->capture_default_str();
    pipeline->add_option("--step-limit", step_limit, "steps per run")->check(CLI::PositiveNumber)->capture_default_str();
    pipeline->add_flag("--compare", compare, "conpredictor against spm");
    pipeline->add_option("--out-dir", out_dir, "directory for intermediate tables and the report (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (*parse) return cmd_parse(input, output);
    if (*ccfg_cmd) return cmd_ccfg(input, output);
    if (*metrics_cmd) return cmd_metrics(input, node_weight, output);
    if (*mutate) return cmd_mutate(input, ops, function, mopts, out_dir);
    if (*exec_cmd) return cmd_exec(ef, seed);
    if (*assemble) return cmd_assemble(metric_files, labels, ff.set(), output);
    if (*train) return cmd_train(input, ff, sf, seed, output);
    if (*evaluate) return cmd_evaluate(input, model_path, compare, ff, sf, seed, out_dir, curves);
    if (*rank) return cmd_rank(input, ff, sf, runs, alpha, effect_alpha, seed, out_dir);
    if (*synth) {
        ss.seed = seed;
        return cmd_synth(ss, output, metadata);
    }
    if (*pipeline) return cmd_pipeline(corpus, labels, ff, sf, compare, seeds, step_limit, seed, out_dir);
    return 1;
}

}  // namespace

int run(int argc, char** argv) {
    try {
        const int code = run_app(argc, argv);
        // CLI11 reports usage errors with its own codes; normalize them.
        return code == 0 ? 0 : 1;
    } catch (const ParseError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << "error: " << d.str() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace conpredict::cli
