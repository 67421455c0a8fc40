#include <gtest/gtest.h>

#include "conpredict/common/error.hpp"
#include "conpredict/exec/executor.hpp"
#include "conpredict/minicc/parser.hpp"
#include "conpredict/mutation/mutation.hpp"
#include "fixtures.hpp"
#include "program_gen.hpp"

using namespace conpredict;
using namespace conpredict::exec;
using mutation::Operator;

namespace {

TestCase main_test(std::vector<std::string> observe = {}) {
    TestCase t;
    t.id = "t1";
    t.observe = std::move(observe);
    return t;
}

Program program(const char* src) { return Program(minicc::parse(src)); }

std::vector<mutation::Mutant> mutants_of(const minicc::SourceUnit& u, Operator op) {
    return mutation::generate_mutants(u, {op});
}

}  // namespace

TEST(TestManifest, ParsesEntriesArgsAndGlobals) {
    auto tests = parse_tests("# header\nmain\n\nsum 3 -4 true | total flag  # trailing\n");
    ASSERT_EQ(tests.size(), 2u);
    EXPECT_EQ(tests[0].id, "t1");
    EXPECT_EQ(tests[0].entry, "main");
    EXPECT_TRUE(tests[0].args.empty());
    EXPECT_EQ(tests[1].id, "t2");
    EXPECT_EQ(tests[1].args, (std::vector<std::int64_t>{3, -4, 1}));
    EXPECT_EQ(tests[1].observe, (std::vector<std::string>{"total", "flag"}));
    EXPECT_THROW(parse_tests("main x1"), InputError);
    EXPECT_THROW(parse_tests("main | a | b"), InputError);
}

TEST(Run, SingleThreadIsScheduleFree) {
    auto p = program("fn main() { print(1); print(2); }");
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto r = p.run(main_test(), seed);
        EXPECT_EQ(r.status, Status::Ok);
        EXPECT_EQ(r.prints, (std::vector<std::string>{"1", "2"}));
        EXPECT_EQ(r.branch_points, 0);
    }
    EXPECT_EQ(reference_set(p, main_test(), 100).size(), 1u);
}

TEST(Run, TwoThreadOrders) {
    auto p = program(R"(
fn w(int id) { print(id); }
fn main() {
    thread a = spawn w(1);
    thread b = spawn w(2);
    join(a);
    join(b);
})");
    std::set<std::string> seen;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto r = p.run(main_test(), seed);
        std::string out;
        for (const auto& s : r.prints) out += s + ",";
        seen.insert(out);
    }
    EXPECT_EQ(seen, (std::set<std::string>{"1,2,", "2,1,"}));
    auto ex = explore_exhaustive(p, main_test(), 12);
    EXPECT_TRUE(ex.complete);
    EXPECT_EQ(ex.observables, (std::set<std::string>{"ok|1,2|", "ok|2,1|"}));
}

TEST(Run, ArgumentsGlobalsAndErrors) {
    auto p = program(R"(
int total = 0;
bool flag = false;
fn sum(int a, int b, bool f) { total = a + b; flag = f; return total; }
fn div(int a) { int x = 10 / a; print(x); }
fn check(int a) { assert(a > 0); print(a); }
)");
    auto tests = parse_tests("sum 3 4 true | total flag\ndiv 0\ncheck -1\ncheck 2\n");
    auto r = p.run(tests[0], 1);
    EXPECT_EQ(r.observable(), "ok||total=7,flag=1");
    EXPECT_EQ(p.run(tests[1], 1).status, Status::RuntimeError);
    auto failed = p.run(tests[2], 1);
    EXPECT_EQ(failed.status, Status::AssertionFailure);
    EXPECT_TRUE(failed.prints.empty());
    EXPECT_EQ(p.run(tests[3], 1).observable(), "ok|2|");
    EXPECT_THROW(p.run(parse_tests("sum 1")[0], 1), InputError);
    EXPECT_THROW(p.run(parse_tests("nope")[0], 1), InputError);
    EXPECT_THROW(p.run(parse_tests("sum 1 2 3")[0], 1), InputError);
    EXPECT_THROW(p.run(parse_tests("sum 1 2 true | missing")[0], 1), InputError);
}

TEST(Run, ArithmeticEdgeCases) {
    auto p = program(R"(
fn main() {
    int big = 9223372036854775807;
    print(big + 1 == 0 - big - 1);
    print(1 << 64, -8 >> 70, 5 >> -1, 3 << 2, -9 % 4, -9 / 4);
    print(true, !true);
})");
    auto r = p.run(main_test(), 1);
    EXPECT_EQ(r.prints, (std::vector<std::string>{"true", "0 -1 0 12 -1 -2", "true false"}));
}

TEST(Run, CallsReturnValuesAndRecursion) {
    auto p = program(R"(
fn fact(int n) {
    if (n <= 1) {
        return 1;
    }
    int r = fact(n - 1);
    return n * r;
}
fn noop() { }
fn main() {
    int x = fact(10);
    noop();
    int y = noop();
    print(x, y);
})");
    EXPECT_EQ(p.run(main_test(), 3).prints, (std::vector<std::string>{"3628800 0"}));
}

TEST(Run, StepLimit) {
    auto p = program("fn main() { int i = 0; while (true) { i = i + 1; } }");
    ExecOptions o;
    o.step_limit = 500;
    auto r = p.run(main_test(), 1, o);
    EXPECT_EQ(r.status, Status::StepLimit);
    EXPECT_EQ(r.steps, 500);
}

TEST(Run, WaitAndSignal) {
    auto p = program(R"(
int ready = 0;
mutex m;
cond c;
fn producer() { lock(m); ready = 1; signal(c); unlock(m); }
fn consumer() {
    lock(m);
    while (ready == 0) {
        wait(c, m);
    }
    print(ready);
    unlock(m);
}
fn main() {
    thread a = spawn consumer();
    thread b = spawn producer();
    join(a);
    join(b);
})");
    auto ex = explore_exhaustive(p, main_test(), 24);
    EXPECT_TRUE(ex.complete);
    EXPECT_FALSE(ex.deadlock);
    EXPECT_EQ(ex.observables, std::set<std::string>{"ok|1|"});
}

TEST(Run, LostSignalDeadlocksButTimedWaitRecovers) {
    const char* lost = R"(
mutex m;
cond c;
fn main() { lock(m); wait(c, m); print(1); }
)";
    EXPECT_EQ(program(lost).run(main_test(), 1).status, Status::Deadlock);
    const char* timed = R"(
mutex m;
cond c;
fn main() { lock(m); timedwait(c, m, 50); print(1); unlock(m); }
)";
    auto r = program(timed).run(main_test(), 1);
    EXPECT_EQ(r.status, Status::Ok);
    EXPECT_EQ(r.prints, std::vector<std::string>{"1"});
}

TEST(Run, JoinOfNullHandleIsNoOp) {
    auto p = program("fn main() { thread t; join(t); print(1); }");
    EXPECT_EQ(p.run(main_test(), 1).observable(), "ok|1|");
}

TEST(Run, SelfRelockDeadlocks) {
    auto p = program("mutex m; fn main() { lock(m); lock(m); }");
    EXPECT_EQ(p.run(main_test(), 1).status, Status::Deadlock);
}

TEST(Determinism, ThousandReplays) {
    Program p(minicc::parse_file(support::data_path("counter.mcc")));
    ExecOptions o;
    o.record_trace = true;
    const auto first = p.run(main_test({"g"}), 42, o);
    ASSERT_FALSE(first.trace.empty());
    for (int i = 0; i < 1000; ++i) {
        const auto r = p.run(main_test({"g"}), 42, o);
        ASSERT_EQ(r.trace, first.trace);
        ASSERT_EQ(r.observable(), first.observable());
    }
}

TEST(Oracle, CounterRmlockLosesUpdate) {
    auto u = minicc::parse_file(support::data_path("counter.mcc"));
    Program orig(u);
    auto ex_orig = explore_exhaustive(orig, main_test(), 12);
    EXPECT_TRUE(ex_orig.complete);
    EXPECT_EQ(ex_orig.observables, std::set<std::string>{"ok|2|"});
    auto rm = mutants_of(u, Operator::Rmlock);
    ASSERT_EQ(rm.size(), 1u);
    Program mp(rm[0].unit);
    auto ex = explore_exhaustive(mp, main_test(), 12);
    EXPECT_TRUE(ex.complete);
    EXPECT_TRUE(ex.observables.count("ok|1|"));
    EXPECT_TRUE(ex.observables.count("ok|2|"));
    int killed = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        auto ref = run_original(orig, main_test(), 100, {}, rep * 1000);
        auto j = judge_mutant(orig, ref, rm[0], mp, main_test());
        EXPECT_TRUE(j.executed);
        killed += j.killed;
    }
    EXPECT_GE(killed, 99);
}

TEST(Oracle, CrossOrderDeadlock) {
    Program p(minicc::parse_file(support::data_path("deadlock.mcc")));
    auto ex = explore_exhaustive(p, main_test(), 16);
    EXPECT_TRUE(ex.complete);
    EXPECT_TRUE(ex.deadlock);
    int found = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        bool dl = false;
        for (std::uint64_t s = 1; s <= 100 && !dl; ++s) dl = p.run(main_test(), rep * 1000 + s).status == Status::Deadlock;
        found += dl;
    }
    EXPECT_GE(found, 95);
}

TEST(Oracle, DeadCodeIsNeverExecuted) {
    auto u = minicc::parse("int g = 0; fn main() { if (false) { g = 1; } print(g); }");
    auto ms = mutants_of(u, Operator::Ssdl);
    ASSERT_EQ(ms.size(), 2u);  // the dead assignment and the print
    ASSERT_EQ(ms[0].touched, std::vector<int>{2});
    auto km = build_kill_matrix(u, ms, {main_test()}, 100);
    EXPECT_FALSE(km.cells[0][0].executed);
    EXPECT_FALSE(km.cells[0][0].killed);
    EXPECT_TRUE(km.cells[1][0].executed);
    EXPECT_TRUE(km.cells[1][0].killed);
}

TEST(Oracle, RemovedJoinKillsIffEnumerationSeesStaleValue) {
    auto u = minicc::parse(R"(
int g = 0;
fn w() { g = 1; }
fn main() {
    thread t = spawn w();
    join(t);
    print(g);
})");
    auto ms = mutants_of(u, Operator::Rmjoinyld);
    ASSERT_EQ(ms.size(), 1u);
    Program mp(ms[0].unit);
    auto ex = explore_exhaustive(mp, main_test(), 12);
    const bool stale = ex.observables.count("ok|0|") > 0;
    EXPECT_TRUE(stale);
    auto km = build_kill_matrix(u, ms, {main_test()}, 100);
    EXPECT_TRUE(km.cells[0][0].executed);
    EXPECT_EQ(km.cells[0][0].killed, stale);
}

TEST(DynamicMetrics, PercentagesFromMatrix) {
    std::vector<mutation::Mutant> ms(3);
    ms[0].id = "a";
    ms[1].id = "b";
    ms[2].id = "c";
    for (auto& m : ms) {
        m.op = Operator::Rmlock;
        m.function = "f";
    }
    ms[2].function = "g";
    KillMatrix km;
    km.mutants = {"a", "b", "c"};
    km.tests = {"t1"};
    km.cells = {{{true, true}}, {{true, false}}, {{false, false}}};
    auto f = dynamic_metrics(km, ms, "f");
    EXPECT_DOUBLE_EQ(f.due(Operator::Rmlock), 100.0);
    EXPECT_DOUBLE_EQ(f.duk(Operator::Rmlock), 50.0);
    EXPECT_DOUBLE_EQ(f.due(Operator::Rmwait), 0.0);
    auto g = dynamic_metrics(km, ms, "g");
    EXPECT_DOUBLE_EQ(g.due(Operator::Rmlock), 0.0);
    EXPECT_DOUBLE_EQ(g.duk(Operator::Rmlock), 0.0);
    EXPECT_DOUBLE_EQ(km.mutation_score(), 1.0 / 3.0);
    auto h = dynamic_metrics(km, ms, "h");
    for (double v : h.executed) EXPECT_EQ(v, 0.0);
}

TEST(ExecutorProperties, RandomPrograms) {
    const TestCase t = main_test();
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        support::GenOptions opts;
        opts.concurrency = true;
        auto u = minicc::parse(support::random_program(seed, opts));
        Program orig(u);
        auto ref = run_original(orig, t, 20);
        auto ms = mutation::generate_mutants(u, mutation::parse_operator_list("all"));
        for (const auto& m : ms) {
            Program mp(m.unit);
            auto j = judge_mutant(orig, ref, m, mp, t);
            EXPECT_TRUE(!j.killed || j.executed) << m.id;
            // Seeds on which the original never reaches the site behave identically.
            const int f = orig.function_index(m.function);
            for (std::size_t i = 0; i < ref.runs.size(); i += 4) {
                if (ref.runs[i].reached(f, m.touched)) continue;
                EXPECT_EQ(mp.run(t, i + 1).observable(), ref.runs[i].observable()) << m.id << " seed " << i + 1;
            }
        }
        auto km = build_kill_matrix(u, ms, {t}, 10);
        for (const auto& fdecl : u.functions) {
            auto r = dynamic_metrics(km, ms, fdecl.name);
            auto mus = mutation::static_mutation_metrics(ms, fdecl.name);
            for (auto op : mutation::kAllOperators) {
                EXPECT_LE(r.duk(op), r.due(op));
                EXPECT_LE(r.due(op), 100.0);
                if (mus[op] == 0) EXPECT_EQ(r.due(op), 0.0);
            }
        }
    }
}

TEST(ExecutorProperties, ExhaustiveCoversSeeded) {
    const TestCase t = main_test();
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 60 && checked < 8; ++seed) {
        support::GenOptions opts;
        opts.concurrency = true;
        opts.functions = 2;
        opts.max_depth = 1;
        opts.max_stmts = 2;
        Program p(minicc::parse(support::random_program(seed, opts)));
        auto ex = explore_exhaustive(p, t, 12, {}, 200000);
        if (!ex.complete) continue;
        ++checked;
        for (std::uint64_t s = 1; s <= 100; ++s)
            EXPECT_TRUE(ex.observables.count(p.run(t, s).observable())) << "program " << seed << " seed " << s;
    }
    EXPECT_GE(checked, 3);
}
