#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "conpredict/common/rng.hpp"
#include "conpredict/minicc/ast.hpp"
#include "conpredict/minicc/cfg.hpp"
#include "conpredict/mutation/mutation.hpp"

namespace conpredict::exec {

/// One line of a test manifest: `entry [args...] [| globals...]`.
struct TestCase {
    std::string id;
    std::string entry = "main";
    std::vector<std::int64_t> args;
    std::vector<std::string> observe;
};

/// Parses a test manifest. Blank lines and `#` comments are skipped; ids are
/// t1, t2, ... in line order. Argument literals are integers, true or false.
std::vector<TestCase> parse_tests(std::string_view text);
std::vector<TestCase> load_tests(const std::string& path);

struct ExecOptions {
    std::int64_t step_limit = 100000;
    bool record_trace = false;
};

enum class Status { Ok, AssertionFailure, Deadlock, StepLimit, RuntimeError };

std::string_view status_name(Status s);

struct TraceEvent {
    std::int64_t step = 0;
    int thread = 0;
    int function = 0;
    int node = 0;

    bool operator==(const TraceEvent&) const = default;
};

struct RunOutcome {
    Status status = Status::Ok;
    std::vector<std::string> prints;
    std::vector<std::pair<std::string, std::int64_t>> globals;
    std::string message;  // assertion / runtime error detail
    std::int64_t steps = 0;
    /// Scheduling decisions with more than one enabled thread.
    int branch_points = 0;
    std::vector<TraceEvent> trace;
    /// covered[function][node]: some thread's program counter reached the node.
    std::vector<std::vector<char>> covered;

    /// Canonical text compared by the kill oracle: status, prints, observed globals.
    std::string observable() const;
    bool reached(int function, const std::vector<int>& nodes) const;
};

/// Picks one of `enabled` (thread ids, ascending) at every step.
class Scheduler {
public:
    virtual ~Scheduler() = default;
    virtual std::size_t choose(const std::vector<int>& enabled) = 0;
};

class SeededScheduler final : public Scheduler {
public:
    explicit SeededScheduler(std::uint64_t seed);
    std::size_t choose(const std::vector<int>& enabled) override;

private:
    Rng rng_;
};

/// A program prepared for repeated interpretation.
class Program {
public:
    explicit Program(const minicc::SourceUnit& unit);
    ~Program();
    Program(Program&&) noexcept;
    Program& operator=(Program&&) noexcept;

    const minicc::SourceUnit& unit() const;
    int function_index(std::string_view name) const;

    /// Cooperative small-step interpretation of one test under a scheduler.
    RunOutcome run(const TestCase& test, Scheduler& scheduler, const ExecOptions& options = {}) const;
    RunOutcome run(const TestCase& test, std::uint64_t seed, const ExecOptions& options = {}) const;

    struct Impl;  // opaque

private:
    std::unique_ptr<Impl> impl_;
};

/// Observables over seeds base+1 .. base+S.
std::set<std::string> reference_set(const Program& p, const TestCase& test, int runs,
                                    const ExecOptions& options = {}, std::uint64_t base_seed = 0);

struct Exploration {
    std::set<std::string> observables;
    std::size_t schedules = 0;
    int max_branch_points = 0;
    /// False when a schedule exceeded the event bound or the schedule cap hit.
    bool complete = true;
    bool deadlock = false;
};

/// Depth-first enumeration of every schedule whose number of scheduling
/// decisions stays within max_events.
Exploration explore_exhaustive(const Program& p, const TestCase& test, int max_events,
                               const ExecOptions& options = {}, std::size_t max_schedules = 1000000);

struct Judgement {
    bool executed = false;
    bool killed = false;
};

/// Per-seed runs of the original for one test; shared by every mutant.
struct OriginalRuns {
    std::vector<RunOutcome> runs;  // seed base+1+i
    std::set<std::string> reference;
    std::uint64_t base_seed = 0;
};

OriginalRuns run_original(const Program& p, const TestCase& test, int runs,
                          const ExecOptions& options = {}, std::uint64_t base_seed = 0);

/// executed: some seed reaches a touched node. A mutant behaves exactly like
/// the original until a thread reaches a touched node, so it only needs to run
/// for seeds on which the original reaches one. killed: one of those runs
/// produces an observable outside the reference set.
Judgement judge_mutant(const Program& original, const OriginalRuns& reference,
                       const mutation::Mutant& mutant, const Program& mutant_program,
                       const TestCase& test, const ExecOptions& options = {});

struct KillMatrix {
    std::vector<std::string> mutants;
    std::vector<std::string> tests;
    std::vector<std::vector<Judgement>> cells;  // [mutant][test]

    bool executed(std::size_t m) const;
    bool killed(std::size_t m) const;
    /// killed mutants / all mutants (0 when there are none).
    double mutation_score() const;
};

KillMatrix build_kill_matrix(const minicc::SourceUnit& original, const std::vector<mutation::Mutant>& mutants,
                             const std::vector<TestCase>& tests, int runs, const ExecOptions& options = {},
                             std::uint64_t base_seed = 0);

/// Percentages per operator, indexed like mutation::kAllOperators.
struct DynMetricRecord {
    std::array<double, 12> executed{};  // MuDuE
    std::array<double, 12> killed{};    // MuDuK

    double due(mutation::Operator op) const { return executed[static_cast<std::size_t>(op)]; }
    double duk(mutation::Operator op) const { return killed[static_cast<std::size_t>(op)]; }
};

DynMetricRecord dynamic_metrics(const KillMatrix& matrix, const std::vector<mutation::Mutant>& mutants,
                                std::string_view function);

}  // namespace conpredict::exec
