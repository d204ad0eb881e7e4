#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "linkstate/error.hpp"
#include "linkstate/state_diff.hpp"
#include "linkstate/state_json.hpp"

using namespace linkstate;
using linkstate::testing::code_of;

namespace {

StateNode dyn(std::initializer_list<DynamicState> entries) { return StateNode(DynamicStateList(entries)); }


}  // namespace

TEST(Encode, MappingKeepsInsertionOrder) {
  StateNode n = StateNode::mapping({{"title", "hello"}, {"size", 5}});
  EXPECT_EQ(encode(n), R"({"title":"hello","size":5})");
}

TEST(Encode, DynamicListUsesReservedKeyOrder) {
  StateNode n = dyn({{"plot1", "ex.Counter", StateNode::mapping({{"count", 2}})}});
  EXPECT_EQ(encode(n), R"([{"objectName":"plot1","className":"ex.Counter","sessionState":{"count":2}}])");
}

TEST(Encode, NullAndScalars) {
  EXPECT_EQ(encode(StateNode()), "null");
  EXPECT_EQ(encode(StateNode(true)), "true");
  EXPECT_EQ(encode(StateNode(2.5)), "2.5");
  EXPECT_EQ(encode(StateNode(-3.0)), "-3");
  EXPECT_EQ(encode(StateNode("a\"b")), R"("a\"b")");
}

TEST(Encode, SortedVariantIgnoresKeyOrder) {
  StateNode a = StateNode::mapping({{"b", 1}, {"a", 2}});
  StateNode b = StateNode::mapping({{"a", 2}, {"b", 1}});
  EXPECT_NE(encode(a), encode(b));
  EXPECT_EQ(encode_sorted(a), encode_sorted(b));
}

TEST(Construct, RejectsNonFinite) {
  EXPECT_EQ(code_of([] { StateNode n(std::numeric_limits<double>::infinity()); }), Errc::kValue);
  EXPECT_EQ(code_of([] { StateNode n(std::nan("")); }), Errc::kValue);
}

TEST(Decode, DetectsDynamicList) {
  StateNode n = decode(R"([{"objectName":"a","className":"ex.C","sessionState":null}])");
  ASSERT_TRUE(n.is_dynamic_list());
  ASSERT_EQ(n.as_dynamic_list().size(), 1u);
  EXPECT_EQ(n.as_dynamic_list()[0].object_name, "a");
  EXPECT_EQ(n.as_dynamic_list()[0].class_name, "ex.C");
  EXPECT_TRUE(n.as_dynamic_list()[0].session_state.is_null());
}

TEST(Decode, PlainArraysStaySequences) {
  StateNode n = decode("[1,2,3]");
  ASSERT_TRUE(n.is_sequence());
  EXPECT_EQ(n.as_sequence().size(), 3u);
  // Objects with foreign keys are user data, not DynamicState.
  EXPECT_TRUE(decode(R"([{"a":1}])").is_sequence());
  EXPECT_TRUE(decode(R"([{"objectName":"x","extra":1}])").is_sequence());
  EXPECT_TRUE(decode(R"([{"sessionState":1}])").is_sequence());
}

TEST(Decode, NestedEmptySequence) {
  StateNode n = decode(R"({"x":{"y":[]}})");
  ASSERT_TRUE(n.is_mapping());
  const StateNode* y = n.get("x")->get("y");
  ASSERT_NE(y, nullptr);
  EXPECT_TRUE(y->is_sequence());
  EXPECT_TRUE(y->as_sequence().empty());
}

TEST(Decode, Errors) {
  EXPECT_EQ(code_of([] { decode("{\"a\":"); }), Errc::kParse);
  EXPECT_EQ(code_of([] { decode("[1,2"); }), Errc::kParse);
  EXPECT_EQ(code_of([] { decode("NaN"); }), Errc::kValue);
  EXPECT_EQ(code_of([] { decode("[Infinity]"); }), Errc::kValue);
}

TEST(Decode, RoundTripsCanonicalText) {
  const std::string text =
      R"({"a":[1,2.5,"x"],"b":{"c":null,"d":true},"e":[{"objectName":"","className":"ex.Label","sessionState":{"text":"t","size":12}}]})";
  EXPECT_EQ(encode(decode(text)), text);
}

TEST(Equivalent, MappingOrderIgnored) {
  EXPECT_TRUE(state_equivalent(StateNode::mapping({{"a", 1}, {"b", 2}}), StateNode::mapping({{"b", 2}, {"a", 1}})));
}

TEST(Equivalent, DynamicOrderMatters) {
  DynamicState x{"x", "ex.Counter", StateNode()};
  DynamicState y{"y", "ex.Counter", StateNode()};
  EXPECT_FALSE(state_equivalent(dyn({x, y}), dyn({y, x})));
  EXPECT_TRUE(state_equivalent(dyn({x, y}), dyn({x, y})));
}

TEST(Equivalent, TypesMustMatch) {
  EXPECT_FALSE(state_equivalent(StateNode(1.0), StateNode("1")));
  EXPECT_FALSE(state_equivalent(StateNode(), StateNode(false)));
  EXPECT_FALSE(state_equivalent(StateNode(0.1 + 0.2), StateNode(0.3)));
}

TEST(Equivalent, EmptySequenceMatchesEmptyDynamicList) {
  EXPECT_TRUE(state_equivalent(StateNode(StateList{}), StateNode(DynamicStateList{})));
  EXPECT_FALSE(state_equivalent(StateNode(StateList{}), StateNode(StateMap{})));
}

TEST(Diff, IdentityIsEmpty) {
  StateNode a = StateNode::mapping({{"a", 1}});
  EXPECT_TRUE(diff(a, a).empty());
  EXPECT_EQ(encode_diff(diff(a, a)), "{}");
}

TEST(Diff, SingleLeafChange) {
  StateNode a = StateNode::mapping({{"a", 1}, {"b", 2}});
  StateNode b = StateNode::mapping({{"a", 1}, {"b", 3}});
  StateDiff d = diff(a, b);
  EXPECT_EQ(encode_diff(d), R"({"b":3})");
  EXPECT_TRUE(state_equivalent(apply(a, d), b));
}

TEST(Diff, RemovedKey) {
  StateNode a = StateNode::mapping({{"a", 1}, {"b", 2}});
  StateNode b = StateNode::mapping({{"a", 1}});
  EXPECT_EQ(encode_diff(diff(a, b)), R"({"b":{"__removed__":true}})");
  EXPECT_TRUE(state_equivalent(apply(a, diff(a, b)), b));
}

TEST(Diff, DynamicListRemovalAndUnchanged) {
  StateNode a = dyn({{"plot1", "ex.Counter", StateNode::mapping({{"count", 1}})},
                     {"plot2", "ex.Counter", StateNode::mapping({{"count", 2}})}});
  StateNode b = dyn({{"plot2", "ex.Counter", StateNode::mapping({{"count", 2}})}});
  StateDiff d = diff(a, b);
  ASSERT_EQ(d.kind(), StateDiff::Kind::kListPatch);
  std::vector<std::pair<EntryPatch::Op, std::string>> ops;
  for (const auto& e : d.entries()) ops.emplace_back(e.op, e.object_name);
  std::vector<std::pair<EntryPatch::Op, std::string>> want{{EntryPatch::Op::kRemoved, "plot1"},
                                                          {EntryPatch::Op::kUnchanged, "plot2"}};
  EXPECT_EQ(ops, want);
  EXPECT_EQ(encode_diff(d), R"([{"objectName":"plot1","__removed__":true},{"objectName":"plot2"}])");
  EXPECT_TRUE(state_equivalent(apply(a, d), b));
}

TEST(Diff, DynamicListReorderIsReported) {
  StateNode a = dyn({{"x", "ex.Counter", StateNode()}, {"y", "ex.Counter", StateNode()}});
  StateNode b = dyn({{"y", "ex.Counter", StateNode()}, {"x", "ex.Counter", StateNode()}});
  StateDiff d = diff(a, b);
  EXPECT_TRUE(d.order_changed());
  EXPECT_TRUE(state_equivalent(apply(a, d), b));
  EXPECT_NE(encode_diff(d).find("__order__"), std::string::npos);
}

TEST(Diff, ClassChangeRecreates) {
  StateNode a = dyn({{"x", "ex.Counter", StateNode::mapping({{"count", 4}})}});
  StateNode b = dyn({{"x", "ex.Label", StateNode::mapping({{"text", "t"}})}});
  StateDiff d = diff(a, b);
  ASSERT_EQ(d.entries().size(), 1u);
  EXPECT_EQ(d.entries()[0].op, EntryPatch::Op::kCreated);
  EXPECT_TRUE(state_equivalent(apply(a, d), b));
}

TEST(Diff, AnonymousEntriesMatchPositionally) {
  StateNode a = dyn({{"", "ex.Counter", StateNode::mapping({{"count", 1}})}});
  StateNode b = dyn({{"", "ex.Counter", StateNode::mapping({{"count", 2}})}});
  StateDiff d = diff(a, b);
  ASSERT_EQ(d.entries().size(), 1u);
  EXPECT_EQ(d.entries()[0].op, EntryPatch::Op::kChanged);
  EXPECT_TRUE(state_equivalent(apply(a, d), b));
}

TEST(Diff, ShapeChangeReplaces) {
  StateNode a = StateNode::mapping({{"a", StateNode::sequence({1, 2})}});
  StateNode b = StateNode::mapping({{"a", StateNode::mapping({{"k", 1}})}});
  EXPECT_EQ(encode_diff(diff(a, b)), R"({"a":{"__replace__":{"k":1}}})");
  EXPECT_TRUE(state_equivalent(apply(a, diff(a, b)), b));
}

TEST(Diff, NeverContainsUnchangedMappingSubtree) {
  StateNode a = StateNode::mapping({{"same", StateNode::mapping({{"x", 1}})}, {"v", 1}});
  StateNode b = StateNode::mapping({{"same", StateNode::mapping({{"x", 1}})}, {"v", 2}});
  EXPECT_EQ(encode_diff(diff(a, b)), R"({"v":2})");
}

TEST(Apply, EmptyDiffIsIdentity) {
  StateNode a = StateNode::mapping({{"a", StateNode::sequence({1, "x"})}});
  EXPECT_TRUE(state_equivalent(apply(a, StateDiff()), a));
}

TEST(Apply, LeafPatch) {
  StateNode out = apply(StateNode::mapping({{"a", 1}}), decode_diff(R"({"a":2})"));
  EXPECT_EQ(encode(out), R"({"a":2})");
}

TEST(Apply, KeepMissingRetainsUnmentionedEntries) {
  StateNode base = dyn({{"a", "ex.Counter", StateNode::mapping({{"count", 1}})},
                        {"b", "ex.Counter", StateNode::mapping({{"count", 2}})}});
  StateDiff d = decode_diff(R"([{"objectName":"a","className":"ex.Counter","sessionDiff":{"count":5}}])");
  StateNode kept = apply(base, d, false);
  StateNode dropped = apply(base, d, true);
  EXPECT_EQ(encode(kept),
            R"([{"objectName":"a","className":"ex.Counter","sessionState":{"count":5}},{"objectName":"b","className":"ex.Counter","sessionState":{"count":2}}])");
  EXPECT_EQ(encode(dropped), R"([{"objectName":"a","className":"ex.Counter","sessionState":{"count":5}}])");
}

TEST(DiffJson, RoundTrip) {
  StateNode a = decode(
      R"({"t":"x","l":[{"objectName":"p","className":"ex.Panel","sessionState":{"title":"a"}},{"objectName":"q","className":"ex.Counter","sessionState":{"count":1}}]})");
  StateNode b = decode(
      R"({"t":"y","l":[{"objectName":"q","className":"ex.Counter","sessionState":{"count":1}},{"objectName":"r","className":"ex.Label","sessionState":{}}]})");
  StateDiff d = diff(a, b);
  StateDiff back = decode_diff(encode_diff(d));
  EXPECT_EQ(encode_diff(back), encode_diff(d));
  EXPECT_TRUE(state_equivalent(apply(a, back), b));
}

TEST(DiffJson, MalformedIsParseError) {
  EXPECT_EQ(code_of([] { decode_diff("{"); }), Errc::kParse);
}
