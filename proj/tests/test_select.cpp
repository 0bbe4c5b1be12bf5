#include "telab/select.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"

using namespace telab;

namespace {

PathSet triangle_all_custom(const Topology& t) {
  return compute_path_set(t, PathAlgorithm::custom, all_ordered_pairs(t));
}

int total_nop(const SelectionResult& s) {
  return std::accumulate(s.nop.begin(), s.nop.end(), 0);
}

}  // namespace

TEST(Select, EntryUsageCountsEveryTouchedNode) {
  Topology t = oracles::load_fixture("triangle.json");
  Path p = make_path(t, {0, 1, 2});
  std::vector<int> q = entry_usage(t, std::vector<Path>{p});
  EXPECT_EQ(q, (std::vector<int>{1, 1, 1}));
  q = entry_usage(t, {p, make_path(t, {0, 2})});
  EXPECT_EQ(q, (std::vector<int>{2, 1, 2}));
}

TEST(Select, HardnopBudgetOnTriangle) {
  Topology t = oracles::load_fixture("triangle.json");
  PathSet ps = triangle_all_custom(t);
  // cycle 1 costs 4 entries per node (each node terminates 4 ordered pairs),
  // cycle 2 adds the 6 three-node paths for 10
  EXPECT_EQ(hardnop_budget(t, ps, FlowEntryLimits::uniform(t, 4)), 1);
  EXPECT_EQ(hardnop_budget(t, ps, FlowEntryLimits::uniform(t, 9)), 1);
  EXPECT_EQ(hardnop_budget(t, ps, FlowEntryLimits::uniform(t, 10)), 2);
  EXPECT_EQ(hardnop_budget(t, ps, FlowEntryLimits::uniform(t, 1000)), 2);
  EXPECT_EQ(hardnop_budget(t, ps, FlowEntryLimits::uniform(t, 3)), 0);
  EXPECT_EQ(hardnop_budget(t, ps, FlowEntryLimits::uniform(t, 0)), 0);
}

TEST(Select, HardnopSelection) {
  Topology t = oracles::load_fixture("triangle.json");
  PathSet ps = triangle_all_custom(t);
  SelectionResult sel = select_hardnop(t, ps, FlowEntryLimits::uniform(t, 4));
  EXPECT_EQ(sel.mode, "hardnop");
  EXPECT_EQ(sel.K, 1);
  EXPECT_EQ(sel.status, "ok");
  EXPECT_EQ(total_nop(sel), 6);
  EXPECT_EQ(sel.usage, (std::vector<int>{4, 4, 4}));
  for (const auto& c : sel.chosen) {
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0], 1);
    EXPECT_EQ(c[1], 0);  // only the first (shortest) path kept
  }

  try {
    select_hardnop(t, ps, FlowEntryLimits::uniform(t, 0));
    FAIL() << "expected infeasible";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible);
    EXPECT_NE(std::string(e.what()).find("no-feasible-selection"),
              std::string::npos);
  }
}

TEST(Select, HardnopCapsAtPathCount) {
  // K never exceeds the deepest group, and shallower groups just take all
  Topology t = oracles::load_fixture("path3.json");
  PathSet ps = compute_path_set(t, PathAlgorithm::custom,
                                {{0, 1}, {0, 2}});  // one path each
  SelectionResult sel =
      select_hardnop(t, ps, FlowEntryLimits::uniform(t, 1000));
  EXPECT_EQ(sel.K, 1);
  EXPECT_EQ(sel.nop, (std::vector<int>{1, 1}));
}

TEST(Select, EmptyGroupsAreIgnoredByBothModes) {
  Topology t = oracles::load_fixture("path3.json");
  PathSet ps = compute_path_set(t, PathAlgorithm::custom, {{0, 2}});
  PathGroup empty;
  empty.src = 2;
  empty.dst = 0;
  empty.status = "disconnected";
  ps.groups.push_back(empty);

  FlowEntryLimits lim = FlowEntryLimits::uniform(t, 100);
  SelectionResult hard = select_hardnop(t, ps, lim);
  EXPECT_EQ(hard.K, 1);
  EXPECT_EQ(hard.nop, (std::vector<int>{1, 0}));

  SelectionResult prog = select_program(t, ps, lim);
  EXPECT_EQ(prog.F, 1);  // floor over groups that have candidates
  EXPECT_EQ(prog.nop, (std::vector<int>{1, 0}));
}

TEST(Select, ProgramBeatsHardnopWhenBudgetsAreAsymmetric) {
  Topology t = oracles::load_fixture("path4_chord.json");
  int a = t.index_of("a"), c = t.index_of("c"), d = t.index_of("d");
  PathSet ps = compute_path_set(t, PathAlgorithm::ksp, {{a, d}, {a, c}},
                                PathParams{2, 0, 32});
  ASSERT_EQ(ps.groups[0].paths.size(), 2u);
  ASSERT_EQ(ps.groups[1].paths.size(), 2u);

  FlowEntryLimits lim = FlowEntryLimits::uniform(t, 100);
  lim.set(t, "b", 1);

  SelectionResult hard = select_hardnop(t, ps, lim);
  EXPECT_EQ(hard.K, 1);
  EXPECT_EQ(total_nop(hard), 2);

  SelectionResult prog = select_program(t, ps, lim);
  EXPECT_EQ(prog.F, 1);
  EXPECT_EQ(total_nop(prog), 3);  // one pair also gets its b-path
  EXPECT_LE(prog.usage[t.index_of("b")], 1);

  oracles::SelectionOptimum want = oracles::selection_exhaustive(t, ps, lim);
  EXPECT_EQ(prog.F, want.F);
  EXPECT_EQ(total_nop(prog), want.total);
}

TEST(Select, ProgramMatchesExhaustiveOnTriangle) {
  Topology t = oracles::load_fixture("triangle.json");
  PathSet ps = triangle_all_custom(t);
  for (int h : {4, 5, 7, 10, 12}) {
    FlowEntryLimits lim = FlowEntryLimits::uniform(t, h);
    SelectionResult prog = select_program(t, ps, lim);
    oracles::SelectionOptimum want = oracles::selection_exhaustive(t, ps, lim);
    EXPECT_EQ(prog.F, want.F) << "h=" << h;
    EXPECT_EQ(total_nop(prog), want.total) << "h=" << h;
    for (int v = 0; v < t.node_count(); ++v) EXPECT_LE(prog.usage[v], h);
  }
}

TEST(Select, ProgramMatchesExhaustiveOnRandomInstances) {
  for (std::uint64_t seed = 90; seed < 96; ++seed) {
    Topology t = oracles::random_connected_graph(5, 0.5, seed);
    // two fixed pairs, k=3: at most 6 indicators
    PathSet ps = compute_path_set(t, PathAlgorithm::ksp, {{0, 1}, {2, 3}},
                                  PathParams{3, 0, 32});
    FlowEntryLimits lim = FlowEntryLimits::uniform(t, 2 + seed % 3);
    SelectionResult prog = select_program(t, ps, lim);
    oracles::SelectionOptimum want = oracles::selection_exhaustive(t, ps, lim);
    EXPECT_EQ(prog.F, want.F) << "seed " << seed;
    EXPECT_EQ(total_nop(prog), want.total) << "seed " << seed;
  }
}

TEST(Select, HardnopKIsMaximal) {
  // recompute usage at K+1 and confirm some node would overflow
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    Topology t = oracles::random_connected_graph(6, 0.5, seed);
    PathSet ps = compute_path_set(t, PathAlgorithm::ksp, all_ordered_pairs(t),
                                  PathParams{3, 0, 32});
    FlowEntryLimits lim = FlowEntryLimits::uniform(t, 14);
    int K = hardnop_budget(t, ps, lim);
    int max_x = 0;
    for (const auto& g : ps.groups)
      max_x = std::max(max_x, static_cast<int>(g.paths.size()));
    ASSERT_LE(K, max_x);

    auto usage_at = [&](int budget) {
      std::vector<Path> flat;
      for (const auto& g : ps.groups)
        for (size_t j = 0; j < std::min<size_t>(budget, g.paths.size()); ++j)
          flat.push_back(g.paths[j]);
      return entry_usage(t, flat);
    };
    std::vector<int> at_k = usage_at(K);
    for (int v = 0; v < t.node_count(); ++v) EXPECT_LE(at_k[v], lim.h[v]);
    if (K < max_x) {
      std::vector<int> over = usage_at(K + 1);
      bool violated = false;
      for (int v = 0; v < t.node_count(); ++v)
        violated |= over[v] > lim.h[v];
      EXPECT_TRUE(violated) << "seed " << seed << " K=" << K;
    }
  }
}

TEST(Select, InputValidation) {
  Topology t = oracles::load_fixture("triangle.json");
  PathSet ps = triangle_all_custom(t);

  FlowEntryLimits wrong;
  wrong.h = {1, 1};  // sized for a different topology
  EXPECT_THROW(hardnop_budget(t, ps, wrong), Error);
  EXPECT_THROW(FlowEntryLimits::uniform(t, -1), Error);

  PathSet unsorted = ps;
  std::swap(unsorted.groups[0].paths[0], unsorted.groups[0].paths[1]);
  EXPECT_THROW(hardnop_budget(t, unsorted, FlowEntryLimits::uniform(t, 10)),
               Error);
  EXPECT_THROW(select_program(t, unsorted, FlowEntryLimits::uniform(t, 10)),
               Error);
}

TEST(Select, ApplySelectionKeepsOnlyChosen) {
  Topology t = oracles::load_fixture("triangle.json");
  PathSet ps = triangle_all_custom(t);
  SelectionResult sel = select_hardnop(t, ps, FlowEntryLimits::uniform(t, 4));
  PathSet applied = apply_selection(ps, sel);
  ASSERT_EQ(applied.groups.size(), ps.groups.size());
  for (size_t g = 0; g < applied.groups.size(); ++g) {
    ASSERT_EQ(applied.groups[g].paths.size(), 1u);
    EXPECT_EQ(applied.groups[g].paths[0].nodes, ps.groups[g].paths[0].nodes);
    EXPECT_EQ(applied.groups[g].src, ps.groups[g].src);
  }
}

TEST(Select, SelectionJsonShape) {
  Topology t = oracles::load_fixture("triangle.json");
  PathSet ps = triangle_all_custom(t);
  FlowEntryLimits lim = FlowEntryLimits::uniform(t, 4);
  SelectionResult sel = select_hardnop(t, ps, lim);
  Json j = selection_to_json(t, ps, sel, lim);
  EXPECT_EQ(j["schema"], "telab/selection-v1");
  EXPECT_EQ(j["mode"], "hardnop");
  EXPECT_EQ(j["K"], 1);
  EXPECT_EQ(j["groups"].size(), 6u);
  EXPECT_EQ(j["usage"]["a"], 4);
  EXPECT_EQ(j["limits"]["a"], 4);
}
