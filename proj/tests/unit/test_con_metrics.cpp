#include <gtest/gtest.h>

#include "conpredict/ccfg/ccfg.hpp"
#include "conpredict/metrics/con_metrics.hpp"
#include "conpredict/metrics/seq_metrics.hpp"
#include "conpredict/minicc/parser.hpp"
#include "fixtures.hpp"
#include "program_gen.hpp"

using namespace conpredict;
using namespace conpredict::metrics;
using ccfg::Ccfg;

namespace {

Ccfg build(const std::string& text) { return ccfg::build_ccfg(minicc::parse(text)); }

Ccfg figure2() { return ccfg::load_ccfg_file(support::data_path("figure2.ccfg")); }

// Hand-built straight-line function: entry, nodes, exit, with optional accesses.
Ccfg chain(const std::vector<std::pair<std::string, bool>>& body, std::vector<int> ids = {}) {
    Ccfg c;
    const int n = static_cast<int>(body.size()) + 2;
    if (ids.empty())
        for (int i = 0; i < n; ++i) ids.push_back(i);
    c.functions.push_back({"f", ids.front(), ids.back()});
    for (int i = 0; i < n; ++i) {
        ccfg::Node node{ids[i], "f", i == 0 ? "entry" : i == n - 1 ? "exit" : "assign", 1, {}};
        if (i > 0 && i < n - 1) {
            node.kind = body[i - 1].first;
            if (body[i - 1].second) node.sv_accesses.push_back({"g", ccfg::Access::Read});
        }
        c.nodes.push_back(node);
        if (i + 1 < n) c.local_edges.emplace_back(ids[i], ids[i + 1]);
    }
    std::sort(c.nodes.begin(), c.nodes.end(), [](auto& a, auto& b) { return a.id < b.id; });
    std::sort(c.local_edges.begin(), c.local_edges.end());
    return c;
}

}  // namespace

TEST(WorkedExample, MetricTable) {
    Ccfg c = figure2();
    struct Row {
        const char* f;
        int spc, svc, csc, cec, ccc;
    };
    for (Row r : {Row{"main", 2, 0, 0, 4, 5}, Row{"foo", 2, 2, 2, 4, 7}, Row{"bar", 2, 2, 0, 4, 5}}) {
        auto m = concurrency_metrics(c, r.f, 2);
        EXPECT_EQ(m.SPC, r.spc) << r.f;
        EXPECT_EQ(m.SVC, r.svc) << r.f;
        EXPECT_EQ(m.CSC, r.csc) << r.f;
        EXPECT_EQ(m.CEC, r.cec) << r.f;
        EXPECT_EQ(m.CCC, r.ccc) << r.f;
    }
    EXPECT_EQ(svd(c, "foo", 2), 9.0);
    auto segs = svd_segments(c, "foo", 2);
    std::sort(segs.begin(), segs.end());
    EXPECT_EQ(segs, (std::vector<double>{8, 10}));
}

TEST(WorkedExample, PrunedCounts) {
    Ccfg c = figure2();
    auto foo = prune(c, "foo");
    EXPECT_EQ(foo.nodes.size(), 10u);
    EXPECT_EQ(foo.edges.size(), 11u);
    auto bar = prune(c, "bar");
    EXPECT_EQ(bar.nodes.size(), 7u);
    EXPECT_EQ(bar.edges.size(), 6u);
}

TEST(WorkedExample, SourceRenderingMatchesWorkers) {
    Ccfg c = build(support::read_text(support::data_path("figure2.mcc")));
    Ccfg fixture = figure2();
    for (const char* f : {"foo", "bar"}) {
        auto a = concurrency_metrics(c, f, 2);
        auto b = concurrency_metrics(fixture, f, 2);
        EXPECT_EQ(a.SPC, b.SPC) << f;
        EXPECT_EQ(a.SVC, b.SVC) << f;
        EXPECT_EQ(a.CSC, b.CSC) << f;
        EXPECT_EQ(a.CEC, b.CEC) << f;
        EXPECT_EQ(a.CCC, b.CCC) << f;
        EXPECT_EQ(a.SVD, b.SVD) << f;
    }
}

TEST(Spc, CountsLockAndUnlockNodes) {
    Ccfg c = build("mutex m; fn f() { lock(m); unlock(m); lock(m); unlock(m); lock(m); unlock(m); yield(); }");
    EXPECT_EQ(spc(c, "f"), 6);
    EXPECT_EQ(spc(build("fn f() { print(1); }"), "f"), 0);
}

TEST(Svc, CountsNodesNotAccesses) {
    Ccfg c = build("int a; int b; fn main() { print(a + b); int x = 1; }");
    EXPECT_EQ(svc(c, "main"), 1);
    EXPECT_EQ(svc(build("fn main() { int x = 1; x = x + 1; }"), "main"), 0);
}

TEST(Csc, NestedIfInWhileCountsOnce) {
    Ccfg c = build("int g; fn main() { int i = 0; while (i < 3) { if (i == 1) { g = 1; } i = i + 1; } }");
    EXPECT_EQ(csc(c, "main"), 1);
}

TEST(Csc, LocalOnlyBranchContributesZero) {
    Ccfg c = build("int g; fn main() { int i = 0; if (i == 1) { i = 2; } g = i; }");
    EXPECT_EQ(csc(c, "main"), 0);
}

TEST(Cec, IncidentEdgeScan) {
    Ccfg c = chain({{"assign", true}, {"assign", true}});
    c.functions.push_back({"h", 10, 11});
    c.nodes.push_back({10, "h", "entry", 1, {}});
    c.nodes.push_back({11, "h", "spawn", 1, {{"g", ccfg::Access::Write}}});
    c.cross_edges = {{11, 0, ccfg::EdgeKind::Fork, ""},
                     {3, 10, ccfg::EdgeKind::Join, ""},
                     {11, 1, ccfg::EdgeKind::Comm, "g"},
                     {11, 2, ccfg::EdgeKind::Comm, "g"}};
    EXPECT_EQ(cec(c, "f"), 4);
    EXPECT_EQ(cec(build("fn main() { print(1); }"), "main"), 0);
}

TEST(Ccc, IrrelevantFunctionIsDegenerate) {
    bool degenerate = false;
    EXPECT_EQ(ccc(build("fn main() { int x = 1; if (x > 0) { x = 2; } }"), "main", &degenerate), 2);
    EXPECT_TRUE(degenerate);
}

TEST(Ccc, StraightLineSyncNodes) {
    // entry, lock, unlock, lock, exit: nothing pruned, 4 edges, 5 nodes.
    Ccfg c = chain({{"lock", false}, {"unlock", false}, {"lock", false}});
    bool degenerate = true;
    EXPECT_EQ(ccc(c, "f", &degenerate), 1);
    EXPECT_FALSE(degenerate);
    EXPECT_EQ(prune(c, "f").nodes.size(), 5u);
}

TEST(Ccc, PrunesIrrelevantArmAndBridges) {
    Ccfg c = build("int g; fn main() { int x = 0; if (x > 0) { x = 1; } else { g = 1; } print(x); }");
    // entry0 decl1 if2 then3 else4 print5 exit6 -> then-arm dropped, 2->5 bridged.
    auto p = prune(c, "main");
    EXPECT_EQ(p.nodes, (std::vector<int>{0, 1, 2, 4, 5, 6}));
    EXPECT_EQ(p.edges, (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 4}, {2, 5}, {4, 5}, {5, 6}}));
    EXPECT_EQ(ccc(c, "main"), 2);
}

TEST(Ccc, AtLeastSequentialCcWithoutPruning) {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        auto u = minicc::parse(support::random_program(seed));
        Ccfg c = ccfg::build_ccfg(u);
        for (const auto& f : u.functions) {
            auto p = prune(c, f.name);
            const auto nodes = c.function_nodes(f.name);
            if (p.degenerate || p.nodes.size() != nodes.size() || cec(c, f.name) == 0) continue;
            EXPECT_GE(ccc(c, f.name), sequential_metrics(u, f.name).CC) << "seed " << seed;
        }
    }
}

TEST(Svd, SingleAccessIsZero) {
    EXPECT_EQ(svd(chain({{"assign", true}, {"assign", false}}), "f", 1), 0.0);
}

TEST(Svd, StraightLineCountsBothEndpoints) {
    // access, three plain nodes, access: 5 nodes of weight 1.
    Ccfg c = chain({{"assign", true}, {"assign", false}, {"assign", false}, {"assign", false}, {"assign", true}});
    EXPECT_EQ(svd(c, "f", 1), 5.0);
}

TEST(Svd, ScalesWithWeightAndIgnoresLabels) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        auto u = minicc::parse(support::random_program(seed));
        Ccfg c = ccfg::build_ccfg(u);
        for (const auto& f : u.functions) {
            const double base = svd(c, f.name, 1);
            EXPECT_DOUBLE_EQ(svd(c, f.name, 3), 3 * base);
        }
    }
    std::vector<std::pair<std::string, bool>> body{{"assign", true}, {"assign", false}, {"assign", true}, {"assign", true}};
    Ccfg a = chain(body);
    Ccfg b = chain(body, {50, 3, 17, 8, 99, 1});
    EXPECT_EQ(svd(a, "f", 2), svd(b, "f", 2));
}

TEST(Svd, TrimmedMeanDropsTenPercentTails) {
    std::vector<double> v{100, 1, 2, 3, 4, 5, 6, 7, 8, -50};
    EXPECT_DOUBLE_EQ(trimmed_mean(v), 4.5);
    EXPECT_DOUBLE_EQ(trimmed_mean({8, 10}), 9.0);
}

TEST(ConMetrics, StrippingConcurrencyZeroesCounts) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Ccfg c = ccfg::build_ccfg(minicc::parse(support::random_program(seed)));
        for (auto& n : c.nodes) {
            n.sv_accesses.clear();
            if (is_relevant(n)) n.kind = "call";
        }
        std::erase_if(c.cross_edges, [](const auto& e) { return e.kind == ccfg::EdgeKind::Comm; });
        for (const auto& f : c.functions) {
            EXPECT_EQ(spc(c, f.name), 0);
            EXPECT_EQ(svc(c, f.name), 0);
            EXPECT_EQ(csc(c, f.name), 0);
        }
    }
}

TEST(ConMetrics, AggregateEqualsIndividualOps) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Ccfg c = ccfg::build_ccfg(minicc::parse(support::random_program(seed)));
        for (const auto& f : c.functions) {
            auto r = concurrency_metrics(c, f.name, 2);
            EXPECT_EQ(r.SPC, spc(c, f.name));
            EXPECT_EQ(r.SVC, svc(c, f.name));
            EXPECT_EQ(r.CSC, csc(c, f.name));
            EXPECT_EQ(r.CEC, cec(c, f.name));
            EXPECT_EQ(r.CCC, ccc(c, f.name));
            EXPECT_EQ(r.SVD, svd(c, f.name, 2));
        }
    }
}

TEST(ConMetrics, EmptyBody) {
    auto r = concurrency_metrics(build("fn main() { }"), "main");
    EXPECT_EQ(r.SPC + r.SVC + r.CSC + r.CEC, 0);
    EXPECT_EQ(r.SVD, 0.0);
    EXPECT_EQ(r.CCC, 2);
    EXPECT_TRUE(r.ccc_degenerate);
}
