#include "conpredict/cli/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include "conpredict/common/error.hpp"
#include "conpredict/metrics/con_metrics.hpp"
#include "conpredict/metrics/seq_metrics.hpp"
#include "conpredict/minicc/cfg.hpp"
#include "conpredict/minicc/parser.hpp"

namespace conpredict::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) { return csv::format_number(v); }

const std::vector<std::string>& con_columns() {
    static const std::vector<std::string> c{"SPC", "SVC", "CSC", "CEC", "CCC", "SVD"};
    return c;
}

const std::vector<std::string>& seq_columns() {
    static const std::vector<std::string> c{"CN", "CM", "CL", "CPA", "CTC", "CP", "CC", "ES", "MN"};
    return c;
}

std::vector<std::string> con_values(const metrics::ConMetricRecord& r) {
    return {num(r.SPC), num(r.SVC), num(r.CSC), num(r.CEC), num(r.CCC), num(r.SVD)};
}

json expr_json(const minicc::Expr& e) {
    json j;
    switch (e.kind) {
        case minicc::ExprKind::IntLit: return {{"int", e.value}};
        case minicc::ExprKind::BoolLit: return {{"bool", e.value != 0}};
        case minicc::ExprKind::Var:
            return {{"var", e.name}, {"scope", e.scope == minicc::VarScope::Global ? "global" : "local"}};
        case minicc::ExprKind::Unary: j["op"] = minicc::op_text(e.op); break;
        case minicc::ExprKind::Binary: j["op"] = minicc::op_text(e.op); break;
        case minicc::ExprKind::Call: j["call"] = e.name; break;
        case minicc::ExprKind::Spawn: j["spawn"] = e.name; break;
    }
    j["args"] = json::array();
    for (const auto& a : e.args) j["args"].push_back(expr_json(a));
    return j;
}

std::string_view stmt_kind_name(minicc::StmtKind k) {
    switch (k) {
        case minicc::StmtKind::Decl: return "decl";
        case minicc::StmtKind::Assign: return "assign";
        case minicc::StmtKind::If: return "if";
        case minicc::StmtKind::While: return "while";
        case minicc::StmtKind::DoWhile: return "do-while";
        case minicc::StmtKind::Return: return "return";
        case minicc::StmtKind::Call: return "call";
        case minicc::StmtKind::Block: return "block";
    }
    return "?";
}

json stmts_json(const std::vector<minicc::Stmt>& stmts);

json stmt_json(const minicc::Stmt& s) {
    json j{{"id", s.id}, {"kind", stmt_kind_name(s.kind)}, {"line", s.loc.line}};
    if (s.kind == minicc::StmtKind::Decl) {
        j["type"] = minicc::type_name(s.decl_type);
        j["name"] = s.target;
    }
    if (s.kind == minicc::StmtKind::Assign) {
        j["target"] = s.target;
        j["op"] = minicc::assign_op_text(s.assign_op);
    }
    if (s.expr) j["expr"] = expr_json(*s.expr);
    if (!s.body.empty()) j["body"] = stmts_json(s.body);
    if (s.has_else) j["else"] = stmts_json(s.else_body);
    return j;
}

json stmts_json(const std::vector<minicc::Stmt>& stmts) {
    json a = json::array();
    for (const auto& s : stmts) a.push_back(stmt_json(s));
    return a;
}

}  // namespace

std::string program_name(const std::string& path) { return fs::path(path).stem().string(); }

json function_document(const minicc::FunctionDecl& f) {
    json params = json::array();
    for (const auto& p : f.params) params.push_back({{"name", p.name}, {"type", minicc::type_name(p.type)}});
    const auto cfg = minicc::lower_to_cfg(f);
    json nodes = json::array();
    for (const auto& n : cfg.nodes)
        nodes.push_back({{"id", n.id}, {"kind", n.kind}, {"line", n.line}, {"weight", n.weight}});
    json edges = json::array();
    for (const auto& [a, b] : cfg.edges) edges.push_back({a, b});
    return {{"function", f.name},
            {"params", params},
            {"lines", {f.first_line, f.last_line}},
            {"nloc", f.nloc},
            {"comment_lines", f.comment_lines},
            {"statements", f.statement_count},
            {"body", stmts_json(f.body)},
            {"cfg", {{"entry", cfg.entry}, {"exit", cfg.exit}, {"nodes", nodes}, {"edges", edges}}}};
}

csv::Table static_metric_table(const std::string& program, const minicc::SourceUnit& u,
                               std::optional<int> node_weight) {
    csv::Table t;
    t.header = {"program", "function", "nloc"};
    for (const auto& c : con_columns()) t.header.push_back(c);
    for (const auto& c : seq_columns()) t.header.push_back(c);
    const auto graph = ccfg::build_ccfg(u);
    for (const auto& f : u.functions) {
        std::vector<std::string> row{program, f.name, num(f.nloc)};
        for (auto& v : con_values(metrics::concurrency_metrics(graph, f.name, node_weight))) row.push_back(v);
        const auto s = metrics::sequential_metrics(u, f.name);
        for (double v : {double(s.CN), double(s.CM), double(s.CL), double(s.CPA), s.CTC, double(s.CP), double(s.CC),
                         double(s.ES), double(s.MN)})
            row.push_back(num(v));
        t.rows.push_back(std::move(row));
    }
    return t;
}

csv::Table ccfg_metric_table(const std::string& program, const ccfg::Ccfg& c, std::optional<int> node_weight) {
    csv::Table t;
    t.header = {"program", "function"};
    for (const auto& col : con_columns()) t.header.push_back(col);
    for (const auto& f : c.functions) {
        std::vector<std::string> row{program, f.name};
        for (auto& v : con_values(metrics::concurrency_metrics(c, f.name, node_weight))) row.push_back(v);
        t.rows.push_back(std::move(row));
    }
    return t;
}

csv::Table mus_table(const std::string& program, const minicc::SourceUnit& u,
                     const std::vector<mutation::Mutant>& mutants) {
    csv::Table t;
    t.header = {"program", "function"};
    for (auto op : mutation::kAllOperators) t.header.push_back("MuS_" + std::string(mutation::operator_name(op)));
    for (const auto& f : u.functions) {
        const auto rec = mutation::static_mutation_metrics(mutants, f.name);
        std::vector<std::string> row{program, f.name};
        for (int c : rec.counts) row.push_back(std::to_string(c));
        t.rows.push_back(std::move(row));
    }
    return t;
}

csv::Table dynamic_table(const std::string& program, const minicc::SourceUnit& u,
                         const std::vector<mutation::Mutant>& mutants, const exec::KillMatrix& matrix) {
    csv::Table t;
    t.header = {"program", "function"};
    for (const char* prefix : {"MuDuE_", "MuDuK_"})
        for (auto op : mutation::kAllOperators) t.header.push_back(prefix + std::string(mutation::operator_name(op)));
    for (const auto& f : u.functions) {
        const auto rec = exec::dynamic_metrics(matrix, mutants, f.name);
        std::vector<std::string> row{program, f.name};
        for (double v : rec.executed) row.push_back(num(v));
        for (double v : rec.killed) row.push_back(num(v));
        t.rows.push_back(std::move(row));
    }
    return t;
}

csv::Table kill_table(const exec::KillMatrix& matrix) {
    csv::Table t;
    t.header = {"mutant", "test", "executed", "killed"};
    for (std::size_t m = 0; m < matrix.mutants.size(); ++m)
        for (std::size_t k = 0; k < matrix.tests.size(); ++k)
            t.rows.push_back({matrix.mutants[m], matrix.tests[k], matrix.cells[m][k].executed ? "1" : "0",
                              matrix.cells[m][k].killed ? "1" : "0"});
    return t;
}

std::vector<exec::TestCase> tests_for(const std::string& source_path) {
    fs::path manifest = fs::path(source_path).replace_extension(".tests");
    if (fs::exists(manifest)) return exec::load_tests(manifest.string());
    exec::TestCase t;
    t.id = "t1";
    return {t};
}

std::vector<csv::Table> merge_tables(const std::vector<csv::Table>& tables) {
    std::vector<csv::Table> out;
    for (const auto& t : tables) {
        auto it = std::find_if(out.begin(), out.end(), [&](const csv::Table& o) { return o.header == t.header; });
        if (it == out.end()) out.push_back(t);
        else it->rows.insert(it->rows.end(), t.rows.begin(), t.rows.end());
    }
    return out;
}

Study run_study(const learn::Dataset& d, const std::string& technique, const StudyOptions& options,
                std::uint64_t seed) {
    Study s;
    s.technique = technique;
    s.cv = learn::cross_validate(d, options.spec, options.cv, seed);
    s.mean_probability.assign(d.rows(), 0.0);
    for (int r = 0; r < options.cv.repeats; ++r) {
        const auto p = s.cv.repeat_probabilities(r, d.rows());
        s.repeats.push_back(stats::evaluate(p, d.y, d.nloc, d.bugs, options.threshold));
        for (std::size_t i = 0; i < p.size(); ++i) s.mean_probability[i] += p[i] / options.cv.repeats;
    }
    return s;
}

csv::Table report_table(const std::string& subject, const std::vector<Study>& studies) {
    csv::Table t;
    t.header = {"technique", "subject", "repeat", "tp",  "fp",     "fn",  "tn",
                "precision", "recall",  "f1",     "auc", "pofb20", "popt"};
    for (const auto& s : studies) {
        stats::EvalReport mean;
        double tp = 0, fp = 0, fn = 0, tn = 0;
        for (std::size_t r = 0; r < s.repeats.size(); ++r) {
            const auto& e = s.repeats[r];
            t.rows.push_back({s.technique, subject, std::to_string(r), std::to_string(e.matrix.tp),
                              std::to_string(e.matrix.fp), std::to_string(e.matrix.fn), std::to_string(e.matrix.tn),
                              num(e.precision), num(e.recall), num(e.f1), num(e.auc), num(e.pofb20), num(e.popt)});
            tp += static_cast<double>(e.matrix.tp);
            fp += static_cast<double>(e.matrix.fp);
            fn += static_cast<double>(e.matrix.fn);
            tn += static_cast<double>(e.matrix.tn);
            mean.precision += e.precision;
            mean.recall += e.recall;
            mean.f1 += e.f1;
            mean.auc += e.auc;
            mean.pofb20 += e.pofb20;
            mean.popt += e.popt;
        }
        const double k = static_cast<double>(std::max<std::size_t>(s.repeats.size(), 1));
        t.rows.push_back({s.technique, subject, "mean", num(tp / k), num(fp / k), num(fn / k), num(tn / k),
                          num(mean.precision / k), num(mean.recall / k), num(mean.f1 / k), num(mean.auc / k),
                          num(mean.pofb20 / k), num(mean.popt / k)});
    }
    return t;
}

csv::Table comparison_table(const Study& a, const Study& b) {
    csv::Table t;
    t.header = {"measure", a.technique + "_mean", b.technique + "_mean", "difference", "p", "d", "magnitude"};
    using Get = double (*)(const stats::EvalReport&);
    const std::vector<std::pair<std::string, Get>> measures{
        {"precision", [](const stats::EvalReport& e) { return e.precision; }},
        {"recall", [](const stats::EvalReport& e) { return e.recall; }},
        {"f1", [](const stats::EvalReport& e) { return e.f1; }},
        {"auc", [](const stats::EvalReport& e) { return e.auc; }},
        {"pofb20", [](const stats::EvalReport& e) { return e.pofb20; }},
        {"popt", [](const stats::EvalReport& e) { return e.popt; }},
    };
    for (const auto& [name, get] : measures) {
        std::vector<double> xa, xb;
        for (const auto& e : a.repeats) xa.push_back(get(e));
        for (const auto& e : b.repeats) xb.push_back(get(e));
        double ma = 0, mb = 0;
        for (double v : xa) ma += v / static_cast<double>(xa.size());
        for (double v : xb) mb += v / static_cast<double>(xb.size());
        const auto eff = stats::cliffs_delta(xa, xb);
        t.rows.push_back({name, num(ma), num(mb), num(ma - mb), num(eff.p), num(eff.d),
                          std::string(stats::magnitude_name(eff.magnitude))});
    }
    return t;
}

csv::Table scott_knott_table(const stats::ScottKnott& sk) {
    csv::Table t;
    t.header = {"group", "metric", "mean_importance", "rank_mean", "rank_highest", "rank_lowest"};
    for (const auto& f : sk.features)
        t.rows.push_back({std::to_string(f.group), f.feature, num(f.mean), num(f.rank_mean),
                          std::to_string(f.rank_highest), std::to_string(f.rank_lowest)});
    return t;
}

csv::Table effect_table(const std::vector<stats::FeatureEffect>& effects) {
    csv::Table t;
    t.header = {"metric", "direction", "p", "d", "magnitude"};
    for (const auto& e : effects)
        t.rows.push_back({e.feature, e.direction, num(e.p), num(e.effect.d),
                          std::string(stats::magnitude_name(e.effect.magnitude))});
    return t;
}

csv::Table roc_table(const std::vector<double>& prob, const std::vector<int>& labels) {
    if (prob.size() != labels.size()) throw InputError("score and label counts differ");
    double pos = 0, neg = 0;
    for (int y : labels) (y ? pos : neg) += 1;
    if (pos == 0 || neg == 0) throw InputError("ROC needs both classes");
    std::vector<std::size_t> order(prob.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return prob[a] > prob[b]; });
    csv::Table t;
    t.header = {"threshold", "fpr", "tpr"};
    t.rows.push_back({"inf", "0", "0"});
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        (labels[order[i]] ? tp : fp) += 1;
        if (i + 1 < order.size() && prob[order[i + 1]] == prob[order[i]]) continue;
        t.rows.push_back({num(prob[order[i]]), num(fp / neg), num(tp / pos)});
    }
    return t;
}

csv::Table effort_table(const std::vector<double>& prob, const std::vector<double>& nloc,
                        const std::vector<double>& bugs) {
    const auto predicted = stats::effort_curve(stats::inspection_order(prob, nloc), nloc, bugs);
    const auto optimal = stats::effort_curve(stats::optimal_order(nloc, bugs), nloc, bugs);
    csv::Table t;
    t.header = {"ordering", "loc_fraction", "bug_fraction"};
    for (const auto& [x, y] : predicted) t.rows.push_back({"predicted", num(x), num(y)});
    for (const auto& [x, y] : optimal) t.rows.push_back({"optimal", num(x), num(y)});
    return t;
}

}  // namespace conpredict::cli
