#include <gtest/gtest.h>

#include "generators.hpp"
#include "linkstate/history.hpp"
#include "linkstate/linking.hpp"
#include "linkstate/state_diff.hpp"
#include "linkstate/state_json.hpp"

using namespace linkstate;
using linkstate::testing::Rng;

// Smaller sweeps than the acceptance run; these keep failures close to the
// module they belong to.

TEST(Property, EncodeDecodeRoundTrip) {
  Rng rng(101);
  for (int i = 0; i < 300; ++i) {
    StateNode n = linkstate::testing::random_state(rng, 4);
    StateNode back = decode(encode(n));
    ASSERT_TRUE(state_equivalent(n, back)) << encode(n);
    ASSERT_EQ(encode(back), encode(n));
  }
}

TEST(Property, DiffApplyCompleteness) {
  Rng rng(202);
  for (int i = 0; i < 300; ++i) {
    StateNode a = linkstate::testing::random_state(rng, 4);
    StateNode b = rng.uniform(0, 3) == 0 ? linkstate::testing::random_state(rng, 4)
                                         : linkstate::testing::mutate_state(a, rng, 3);
    StateDiff d = diff(a, b);
    ASSERT_TRUE(state_equivalent(apply(a, d), b)) << encode(a) << " -> " << encode(b) << " via " << encode_diff(d);
    ASSERT_TRUE(state_equivalent(apply(a, decode_diff(encode_diff(d))), b)) << encode_diff(d);
    ASSERT_TRUE(diff(a, a).empty());
    ASSERT_EQ(d.empty(), state_equivalent(a, b));
  }
}

TEST(Property, GraphRoundTrip) {
  Rng rng(303);
  for (int i = 0; i < 100; ++i) {
    Runtime rt(demo::demo_registry());
    auto src = std::make_shared<LinkableHashMap>(rt);
    linkstate::testing::populate_random_graph(*src, rng);
    const StateNode s = src->session_state();
    auto dst = std::make_shared<LinkableHashMap>(rt);
    ASSERT_TRUE(dst->set_session_state(s).empty()) << encode(s);
    ASSERT_TRUE(state_equivalent(dst->session_state(), s)) << encode(s) << "\n" << encode(dst->session_state());
  }
}

TEST(Property, HistoryReplay) {
  Rng rng(404);
  for (int i = 0; i < 30; ++i) {
    Runtime rt(demo::demo_registry());
    auto root = std::make_shared<LinkableHashMap>(rt);
    SessionHistory log([] { return 0; });
    log.attach(root);
    for (int e = 0; e < 10; ++e) {
      linkstate::testing::random_graph_edit(*root, rng);
      rt.scheduler().flush_frame();
    }
    ASSERT_TRUE(log.verify().empty());
    ASSERT_TRUE(state_equivalent(log.state_at(log.size()), root->session_state()));
  }
}

TEST(Property, LinkedPairsConverge) {
  Rng rng(505);
  for (int i = 0; i < 30; ++i) {
    Runtime rt(demo::demo_registry());
    auto a = std::make_shared<LinkableHashMap>(rt);
    auto b = std::make_shared<LinkableHashMap>(rt);
    auto link = link_session_state(a, b);
    for (int e = 0; e < 10; ++e) linkstate::testing::random_graph_edit(rng.uniform(0, 1) ? *a : *b, rng);
    ASSERT_TRUE(state_equivalent(a->session_state(), b->session_state()));
  }
}
