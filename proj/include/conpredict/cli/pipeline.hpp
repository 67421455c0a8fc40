#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conpredict/ccfg/ccfg.hpp"
#include "conpredict/common/csv.hpp"
#include "conpredict/exec/executor.hpp"
#include "conpredict/learn/cv.hpp"
#include "conpredict/learn/dataset.hpp"
#include "conpredict/minicc/ast.hpp"
#include "conpredict/mutation/mutation.hpp"
#include "conpredict/stats/effect.hpp"
#include "conpredict/stats/importance.hpp"
#include "conpredict/stats/metrics.hpp"
#include "json.hpp"

// Building blocks shared by the subcommands, so that `pipeline` is the
// composition of the individual steps.
namespace conpredict::cli {

/// File name without directory and extension.
std::string program_name(const std::string& path);

/// One JSON document per function: signature, statements and CFG.
nlohmann::json function_document(const minicc::FunctionDecl& f);

/// program,function,nloc,SPC..SVD,CN..MN; one row per function.
csv::Table static_metric_table(const std::string& program, const minicc::SourceUnit& u,
                               std::optional<int> node_weight = std::nullopt);
/// program,function,SPC..SVD for a stored graph (no source, so no sequential metrics).
csv::Table ccfg_metric_table(const std::string& program, const ccfg::Ccfg& c,
                             std::optional<int> node_weight = std::nullopt);

/// program,function,MuS_<op> for all twelve operators.
csv::Table mus_table(const std::string& program, const minicc::SourceUnit& u,
                     const std::vector<mutation::Mutant>& mutants);
/// program,function,MuDuE_<op>...,MuDuK_<op>...
csv::Table dynamic_table(const std::string& program, const minicc::SourceUnit& u,
                         const std::vector<mutation::Mutant>& mutants, const exec::KillMatrix& matrix);
/// mutant,test,executed,killed
csv::Table kill_table(const exec::KillMatrix& matrix);

/// The `<program>.tests` manifest next to the source when present, else a
/// single test running main.
std::vector<exec::TestCase> tests_for(const std::string& source_path);

/// Tables with identical headers are concatenated (in order of appearance),
/// so per-program tables of one kind join as one.
std::vector<csv::Table> merge_tables(const std::vector<csv::Table>& tables);

struct StudyOptions {
    learn::ClassifierSpec spec;
    learn::CvOptions cv;
    double threshold = 0.5;
};

/// Per-repeat evaluation of cross-validated predictions.
struct Study {
    std::string technique;
    learn::CvResult cv;
    std::vector<stats::EvalReport> repeats;
    /// Out-of-fold probability per row, averaged over repeats.
    std::vector<double> mean_probability;
};

Study run_study(const learn::Dataset& d, const std::string& technique, const StudyOptions& options,
                std::uint64_t seed);

/// technique,subject,repeat,tp,fp,fn,tn,precision,recall,f1,auc,pofb20,popt
/// with a final "mean" row per study.
csv::Table report_table(const std::string& subject, const std::vector<Study>& studies);

/// measure,<a>_mean,<b>_mean,difference,p,d,magnitude: one-sided Wilcoxon of
/// the per-repeat values of a over b, and Cliff's delta.
csv::Table comparison_table(const Study& a, const Study& b);

/// group,metric,mean_importance,rank_mean,rank_highest,rank_lowest
csv::Table scott_knott_table(const stats::ScottKnott& sk);
/// metric,direction,p,d,magnitude
csv::Table effect_table(const std::vector<stats::FeatureEffect>& effects);

/// threshold,fpr,tpr from the distinct scores, highest first.
csv::Table roc_table(const std::vector<double>& prob, const std::vector<int>& labels);
/// loc_fraction,bug_fraction for the predicted and the optimal ordering.
csv::Table effort_table(const std::vector<double>& prob, const std::vector<double>& nloc,
                        const std::vector<double>& bugs);

}  // namespace conpredict::cli
