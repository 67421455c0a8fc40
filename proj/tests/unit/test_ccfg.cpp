#include <gtest/gtest.h>

#include <map>
#include <set>

#include "conpredict/ccfg/ccfg.hpp"
#include "conpredict/common/error.hpp"
#include "conpredict/minicc/parser.hpp"
#include "fixtures.hpp"
#include "program_gen.hpp"

using namespace conpredict;
using namespace conpredict::ccfg;

namespace {

const char* kTwoWorkers = R"(
int g = 0;
mutex m;

fn foo() {
    lock(m);
    g = 1;
    unlock(m);
    return 0;
}

fn bar() {
    int a = g;
    int b = g + 1;
    print(a, b);
    return 0;
}

fn main() {
    thread t1 = spawn foo();
    thread t2 = spawn bar();
    join(t1);
    join(t2);
    return 0;
}
)";

}  // namespace

TEST(SharedVars, NoGlobals) {
    auto s = identify_shared(minicc::parse("fn main() { print(1); }"));
    EXPECT_TRUE(s.entries.empty());
    EXPECT_TRUE(s.accesses.empty());
}

TEST(SharedVars, WriterAndReader) {
    auto u = minicc::parse(kTwoWorkers);
    auto s = identify_shared(u);
    ASSERT_EQ(s.entries.size(), 1u);
    EXPECT_EQ(s.entries[0].name, "g");
    int foo_writes = 0, bar_reads = 0, other = 0;
    for (const auto& a : s.accesses) {
        if (a.function == "foo" && a.access == Access::Write) ++foo_writes;
        else if (a.function == "bar" && a.access == Access::Read) ++bar_reads;
        else ++other;
    }
    EXPECT_EQ(foo_writes, 1);
    EXPECT_EQ(bar_reads, 2);
    EXPECT_EQ(other, 0);
}

TEST(SharedVars, LockObjectsExcluded) {
    auto s = identify_shared(minicc::parse("mutex m; fn main() { lock(m); unlock(m); }"));
    EXPECT_TRUE(s.entries.empty());
}

TEST(SharedVars, UnreachableFunctionsIgnored) {
    auto s = identify_shared(minicc::parse("int g; fn main() { print(1); } fn dead() { g = 1; }"));
    EXPECT_TRUE(s.entries.empty());
}

TEST(BuildCcfg, ForkJoinAndComm) {
    auto c = build_ccfg(minicc::parse(kTwoWorkers));
    EXPECT_EQ(c.count(EdgeKind::Fork), 2);
    EXPECT_EQ(c.count(EdgeKind::Join), 2);
    EXPECT_EQ(c.count(EdgeKind::Comm), 2);
    EXPECT_TRUE(c.diagnostics.empty());
    for (const auto& e : c.cross_edges) {
        const Node* a = c.find_node(e.from);
        const Node* b = c.find_node(e.to);
        if (e.kind == EdgeKind::Fork) {
            EXPECT_EQ(a->kind, "spawn");
            EXPECT_EQ(c.function(b->function).entry, b->id);
        } else if (e.kind == EdgeKind::Join) {
            EXPECT_EQ(c.function(a->function).exit, a->id);
            EXPECT_EQ(b->kind, "join");
        }
        EXPECT_NE(a->function, b->function);
    }
}

TEST(BuildCcfg, SingleThreadedHasNoCrossEdges) {
    auto c = build_ccfg(minicc::parse("int g; fn main() { g = 1; int x = helper(); print(g); } fn helper() { g = 2; return g; }"));
    EXPECT_TRUE(c.cross_edges.empty());
}

TEST(BuildCcfg, JoinWithoutSpawnIsDiagnosed) {
    auto c = build_ccfg(minicc::parse("fn w(thread t) { join(t); } fn main() { print(1); }"));
    ASSERT_EQ(c.diagnostics.size(), 1u);
    EXPECT_NE(c.diagnostics[0].find("never-spawned"), std::string::npos);
}

TEST(BuildCcfg, DuplicatedContextCommunicatesWithItself) {
    auto c = build_ccfg(minicc::parse(
        "int g; fn w() { g = g + 1; return 0; }"
        "fn main() { thread a = spawn w(); thread b = spawn w(); join(a); join(b); }"));
    ASSERT_EQ(c.count(EdgeKind::Comm), 1);
    EXPECT_EQ(c.count(EdgeKind::Join), 2);
}

// Independent oracle: main spawns k workers that call nothing, so each
// worker is exactly one context and main is another.
TEST(BuildCcfg, CommEdgeCompletenessAgainstBruteForce) {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        support::GenOptions o;
        o.functions = 3;
        std::string text = support::random_program(seed, o);
        minicc::SourceUnit u = minicc::parse(text);
        // Drop user calls from workers by only keeping programs without them.
        bool has_calls = false;
        for (const auto& f : u.functions)
            minicc::for_each_stmt(f.body, [&](const minicc::Stmt& s, int) {
                if (s.expr && s.expr->kind == minicc::ExprKind::Call && s.expr->builtin == minicc::Builtin::None)
                    has_calls = true;
            });
        if (has_calls) continue;
        Ccfg c = build_ccfg(u);
        std::map<std::string, std::set<std::string>> ctx;  // function -> contexts
        ctx["main"].insert("main");
        for (const auto& t : c.threads) ctx[t.target].insert(std::to_string(t.spawn_node));
        std::set<std::tuple<int, int, std::string>> expected;
        for (const auto& w : c.nodes)
            for (const auto& wa : w.sv_accesses) {
                if (wa.access != Access::Write) continue;
                for (const auto& r : c.nodes)
                    for (const auto& ra : r.sv_accesses) {
                        if (ra.access != Access::Read || ra.var != wa.var) continue;
                        bool differ = false;
                        for (const auto& A : ctx[w.function])
                            for (const auto& B : ctx[r.function]) differ |= A != B;
                        if (differ) expected.insert({w.id, r.id, wa.var});
                    }
            }
        std::set<std::tuple<int, int, std::string>> actual;
        for (const auto& e : c.cross_edges)
            if (e.kind == EdgeKind::Comm) actual.insert({e.from, e.to, e.var});
        EXPECT_EQ(actual, expected) << "seed " << seed;
    }
}

TEST(BuildCcfg, DeterministicAndRoundTrips) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        std::string text = support::random_program(seed);
        Ccfg a = build_ccfg(minicc::parse(text));
        Ccfg b = build_ccfg(minicc::parse(text));
        ASSERT_TRUE(a.same_graph(b));
        const std::string dumped = dump_ccfg(a);
        Ccfg loaded = load_ccfg(dumped);
        ASSERT_TRUE(loaded.same_graph(a)) << "seed " << seed;
        EXPECT_EQ(dump_ccfg(loaded), dumped);
    }
}

TEST(LoadCcfg, DanglingReferenceNamesNode) {
    const std::string doc = R"({"functions":[{"name":"f","entry":0,"exit":1}],
      "nodes":[{"id":0,"function":"f","kind":"entry","weight":1,"sv_accesses":[]},
               {"id":1,"function":"f","kind":"exit","weight":1,"sv_accesses":[]}],
      "local_edges":[{"from":0,"to":42}],"cross_edges":[],"shared_vars":[],"threads":[]})";
    try {
        load_ccfg(doc);
        FAIL() << "expected an error";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("42"), std::string::npos);
    }
    EXPECT_THROW(load_ccfg("{not json"), InputError);
}

TEST(LoadCcfg, WorkedExampleFixture) {
    Ccfg c = load_ccfg_file(support::data_path("figure2.ccfg"));
    EXPECT_EQ(c.count(EdgeKind::Fork), 2);
    EXPECT_EQ(c.count(EdgeKind::Join), 2);
    EXPECT_EQ(c.count(EdgeKind::Comm), 2);
    std::set<std::pair<int, int>> comm;
    for (const auto& e : c.cross_edges)
        if (e.kind == EdgeKind::Comm) comm.insert({e.from, e.to});
    EXPECT_EQ(comm, (std::set<std::pair<int, int>>{{11, 17}, {18, 7}}));
    EXPECT_EQ(c.shared_vars.size(), 1u);
}
