#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conpredict/minicc/ast.hpp"

namespace conpredict::mutation {

enum class Operator {
    Ssdl, Swdd, Oasn, Oeba, Olng, Orrn,
    Rmlock, Rmwait, Rmsig, Rmjoinyld, Shfecs, Spltecs,
};

inline constexpr std::array<Operator, 12> kAllOperators{
    Operator::Ssdl,   Operator::Swdd,   Operator::Oasn,      Operator::Oeba,
    Operator::Olng,   Operator::Orrn,   Operator::Rmlock,    Operator::Rmwait,
    Operator::Rmsig,  Operator::Rmjoinyld, Operator::Shfecs, Operator::Spltecs,
};

std::string_view operator_name(Operator op);
/// Throws InputError for an unknown name.
Operator operator_from_name(std::string_view name);
bool is_concurrency_operator(Operator op);
/// Parses a comma-separated list; "all", "seq" and "con" are shorthands.
std::vector<Operator> parse_operator_list(std::string_view text);

struct MutationOptions {
    /// oeba also emits `&=` (two mutants per site instead of one).
    bool oeba_and = false;
    /// rmlock removes single lock/unlock calls instead of matched pairs.
    bool rmlock_single = false;
};

/// One place an operator applies. Statement ids refer to the original unit.
struct Site {
    Operator op = Operator::Ssdl;
    std::string function;
    int index = 0;  // per (operator, function), source order
    std::vector<int> stmts;  // statements the mutation touches
    std::vector<int> variants;  // feasible variant numbers
    std::string description;

    // Locator details used by the rewriter.
    int expr_index = -1;  // pre-order expression index inside stmts[0]
};

struct Mutant {
    std::string id;  // op:function:site:variant
    Operator op = Operator::Ssdl;
    std::string function;
    int site = 0;
    int variant = 0;
    std::vector<int> touched;
    std::string description;
    std::string source;
    minicc::SourceUnit unit;
};

struct EnumerationReport {
    /// Lock/unlock calls rmlock could not pair, e.g. "f:7 lock(m)".
    std::vector<std::string> unmatched;
};

std::vector<Site> enumerate_sites(const minicc::SourceUnit& u, Operator op,
                                  const MutationOptions& options = {},
                                  EnumerationReport* report = nullptr);

/// Generates every mutant of the given operators, optionally restricted to
/// one function. Throws InternalError if a mutant fails to re-parse.
std::vector<Mutant> generate_mutants(const minicc::SourceUnit& u, const std::vector<Operator>& ops,
                                     const MutationOptions& options = {},
                                     std::optional<std::string> function = std::nullopt);

struct MuSRecord {
    std::array<int, 12> counts{};

    int operator[](Operator op) const { return counts[static_cast<std::size_t>(op)]; }
    int total() const;
};

MuSRecord static_mutation_metrics(const std::vector<Mutant>& mutants, std::string_view function);

/// JSON manifest: one entry per mutant (id, operator, function, site, variant,
/// touched statements, description, file).
std::string manifest_json(const std::vector<Mutant>& mutants, const std::vector<std::string>& files);

/// Reads a manifest written by `mutate`; mutant files are resolved relative
/// to the manifest's directory. Throws InputError on malformed entries.
std::vector<Mutant> load_manifest(const std::string& path);

/// File name used by `mutate`: op_function_site_variant.mcc
std::string mutant_file_name(const Mutant& m);

}  // namespace conpredict::mutation
