#include <gtest/gtest.h>

#include "linkstate/callbacks.hpp"
#include "linkstate/error.hpp"
#include "trace_capture.hpp"

using namespace linkstate;

namespace {

struct Fixture : ::testing::Test {
  FrameScheduler scheduler;
  CallbackCollection cc{scheduler};
};

using Immediate = Fixture;
using Grouped = Fixture;
using Delay = Fixture;
using Flush = Fixture;

}  // namespace

TEST_F(Immediate, RunsOncePerTrigger) {
  int runs = 0;
  cc.add_immediate_callback([&] { ++runs; });
  cc.trigger_callbacks();
  EXPECT_EQ(runs, 1);
  cc.trigger_callbacks();
  EXPECT_EQ(runs, 2);
}

TEST_F(Immediate, RunNowRunsWithoutTrigger) {
  int runs = 0;
  cc.add_immediate_callback([&] { ++runs; }, true);
  EXPECT_EQ(runs, 1);
  EXPECT_EQ(cc.trigger_counter(), 0u);
}

TEST_F(Immediate, DuplicateKeyRejected) {
  int tag = 0;
  cc.add_immediate_callback([] {}, false, &tag);
  try {
    cc.add_immediate_callback([] {}, false, &tag);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDuplicateCallback);
  }
}

TEST_F(Immediate, RegistrationOrder) {
  std::string order;
  cc.add_immediate_callback([&] { order += 'a'; });
  cc.add_immediate_callback([&] { order += 'b'; });
  cc.add_immediate_callback([&] { order += 'c'; });
  cc.trigger_callbacks();
  EXPECT_EQ(order, "abc");
}

TEST_F(Immediate, RecursionGuardSkipsOnlyTheRunningCallback) {
  int self_runs = 0;
  int other_runs = 0;
  int depth = 0;
  int max_depth = 0;
  cc.add_immediate_callback([&] {
    ++self_runs;
    ++depth;
    max_depth = std::max(max_depth, depth);
    cc.trigger_callbacks();
    --depth;
  });
  cc.add_immediate_callback([&] { ++other_runs; });
  cc.trigger_callbacks();
  EXPECT_EQ(self_runs, 1);
  EXPECT_EQ(max_depth, 1);
  // The nested trigger still reaches the other callback.
  EXPECT_EQ(other_runs, 2);
}

TEST_F(Immediate, AddedDuringTriggerWaitsForNextTrigger) {
  int late = 0;
  bool added = false;
  cc.add_immediate_callback([&] {
    if (!added) {
      added = true;
      cc.add_immediate_callback([&] { ++late; });
    }
  });
  cc.trigger_callbacks();
  EXPECT_EQ(late, 0);
  cc.trigger_callbacks();
  EXPECT_EQ(late, 1);
}

TEST_F(Immediate, RemoveThenTrigger) {
  int runs = 0;
  auto h = cc.add_immediate_callback([&] { ++runs; });
  cc.remove_callback(h);
  cc.trigger_callbacks();
  EXPECT_EQ(runs, 0);
  EXPECT_FALSE(cc.has_callback(h));
}

TEST_F(Immediate, RemovedLaterInOrderDoesNotRun) {
  std::string order;
  CallbackHandle b;
  cc.add_immediate_callback([&] {
    order += 'a';
    cc.remove_callback(b);
  });
  b = cc.add_immediate_callback([&] { order += 'b'; });
  cc.add_immediate_callback([&] { order += 'c'; });
  cc.trigger_callbacks();
  EXPECT_EQ(order, "ac");
}

TEST_F(Immediate, UnknownHandle) {
  try {
    cc.remove_callback(CallbackHandle{999});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnknownHandle);
  }
}

TEST_F(Immediate, TriggerCounterIncrements) {
  cc.trigger_callbacks();
  cc.trigger_callbacks();
  EXPECT_EQ(cc.trigger_counter(), 2u);
}

TEST_F(Delay, CoalescesTriggers) {
  int runs = 0;
  cc.add_immediate_callback([&] { ++runs; });
  cc.delay_callbacks();
  for (int i = 0; i < 3; ++i) cc.trigger_callbacks();
  EXPECT_EQ(runs, 0);
  EXPECT_TRUE(cc.has_pending_trigger());
  cc.resume_callbacks();
  EXPECT_EQ(runs, 1);
  EXPECT_EQ(cc.trigger_counter(), 1u);
}

TEST_F(Delay, NestedCounting) {
  int runs = 0;
  cc.add_immediate_callback([&] { ++runs; });
  cc.delay_callbacks();
  cc.delay_callbacks();
  cc.trigger_callbacks();
  cc.resume_callbacks();
  EXPECT_EQ(runs, 0);
  EXPECT_EQ(cc.delay_count(), 1u);
  cc.resume_callbacks();
  EXPECT_EQ(runs, 1);
}

TEST_F(Delay, NoTriggerNoRun) {
  int runs = 0;
  cc.add_immediate_callback([&] { ++runs; });
  cc.delay_callbacks();
  cc.resume_callbacks();
  EXPECT_EQ(runs, 0);
  EXPECT_EQ(cc.trigger_counter(), 0u);
}

TEST_F(Delay, FiveTriggersOneRun) {
  int runs = 0;
  cc.add_immediate_callback([&] { ++runs; });
  {
    DelayGuard guard(cc);
    for (int i = 0; i < 5; ++i) cc.trigger_callbacks();
  }
  EXPECT_EQ(runs, 1);
}

TEST_F(Delay, ResumeWithoutDelay) {
  try {
    cc.resume_callbacks();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kResumeWithoutDelay);
  }
  EXPECT_EQ(cc.delay_count(), 0u);
}

TEST_F(Grouped, CoalescesWithinFrame) {
  int runs = 0;
  cc.add_grouped_callback([&] { ++runs; });
  cc.trigger_callbacks();
  cc.trigger_callbacks();
  EXPECT_EQ(runs, 0);
  scheduler.flush_frame();
  EXPECT_EQ(runs, 1);
  scheduler.flush_frame();
  EXPECT_EQ(runs, 1);
}

TEST_F(Grouped, SharedAcrossCollections) {
  CallbackCollection other(scheduler);
  int runs = 0;
  GroupedCallback g = scheduler.make_grouped([&] { ++runs; });
  cc.add_grouped_callback(g);
  other.add_grouped_callback(g);
  cc.trigger_callbacks();
  other.trigger_callbacks();
  EXPECT_EQ(scheduler.pending_count(), 1u);
  scheduler.flush_frame();
  EXPECT_EQ(runs, 1);
}

TEST_F(Grouped, NeverTriggeredNeverRuns) {
  int runs = 0;
  cc.add_grouped_callback([&] { ++runs; });
  scheduler.flush_frame();
  EXPECT_EQ(runs, 0);
}

TEST_F(Grouped, RemovedBeforeFlushDoesNotRun) {
  int runs = 0;
  auto h = cc.add_grouped_callback([&] { ++runs; });
  cc.trigger_callbacks();
  cc.remove_callback(h);
  scheduler.flush_frame();
  EXPECT_EQ(runs, 0);
}

TEST_F(Grouped, StillRunsWhenAnotherSourceRemains) {
  CallbackCollection other(scheduler);
  int runs = 0;
  GroupedCallback g = scheduler.make_grouped([&] { ++runs; });
  auto h = cc.add_grouped_callback(g);
  other.add_grouped_callback(g);
  cc.trigger_callbacks();
  other.trigger_callbacks();
  cc.remove_callback(h);
  scheduler.flush_frame();
  EXPECT_EQ(runs, 1);
}

TEST_F(Flush, SelfRescheduleWaitsForNextFlush) {
  int runs = 0;
  cc.add_grouped_callback([&] {
    ++runs;
    if (runs == 1) cc.trigger_callbacks();
  });
  cc.trigger_callbacks();
  scheduler.flush_frame();
  EXPECT_EQ(runs, 1);
  scheduler.flush_frame();
  EXPECT_EQ(runs, 2);
  scheduler.flush_frame();
  EXPECT_EQ(runs, 2);
}

TEST_F(Flush, EmptyFlushCountsFrame) {
  scheduler.flush_frame();
  EXPECT_EQ(scheduler.frame_count(), 1u);
}

TEST_F(Flush, ReentrantFlushRejected) {
  bool threw = false;
  cc.add_grouped_callback([&] {
    try {
      scheduler.flush_frame();
    } catch (const Error& e) {
      threw = e.code() == Errc::kReentrantFlush;
    }
  });
  cc.trigger_callbacks();
  scheduler.flush_frame();
  EXPECT_TRUE(threw);
}

TEST_F(Flush, FirstScheduledOrder) {
  CallbackCollection other(scheduler);
  std::string order;
  cc.add_grouped_callback([&] { order += 'a'; });
  other.add_grouped_callback([&] { order += 'b'; });
  other.trigger_callbacks();
  cc.trigger_callbacks();
  scheduler.flush_frame();
  EXPECT_EQ(order, "ba");
}

TEST(Bubbling, ThreeLevelChain) {
  FrameScheduler scheduler;
  CallbackCollection grandparent(scheduler), parent(scheduler), child(scheduler);
  parent.add_parent(grandparent);
  child.add_parent(parent);
  int gp_runs = 0, p_runs = 0;
  grandparent.add_immediate_callback([&] { ++gp_runs; });
  parent.add_immediate_callback([&] { ++p_runs; });
  child.trigger_callbacks();
  EXPECT_EQ(p_runs, 1);
  EXPECT_EQ(gp_runs, 1);
  EXPECT_EQ(parent.trigger_counter(), 1u);
  EXPECT_EQ(grandparent.trigger_counter(), 1u);
}

TEST(Bubbling, DelayedParentCollapsesChildTriggers) {
  FrameScheduler scheduler;
  CallbackCollection parent(scheduler), a(scheduler), b(scheduler);
  a.add_parent(parent);
  b.add_parent(parent);
  int runs = 0;
  parent.add_immediate_callback([&] { ++runs; });
  parent.delay_callbacks();
  a.trigger_callbacks();
  b.trigger_callbacks();
  parent.resume_callbacks();
  EXPECT_EQ(runs, 1);
}

TEST(Bubbling, RemoveParentStopsBubbling) {
  FrameScheduler scheduler;
  CallbackCollection parent(scheduler), child(scheduler);
  child.add_parent(parent);
  EXPECT_TRUE(child.has_parent(parent));
  child.remove_parent(parent);
  child.trigger_callbacks();
  EXPECT_EQ(parent.trigger_counter(), 0u);
}

TEST(Trace, InvocationOrderIsRecorded) {
  linkstate::testing::TraceCapture capture;
  FrameScheduler scheduler;
  CallbackCollection cc(scheduler);
  cc.add_immediate_callback([] {});
  cc.add_grouped_callback([] {});
  cc.trigger_callbacks();
  scheduler.flush_frame();
  ASSERT_EQ(capture.lines().size(), 2u);
  EXPECT_EQ(capture.lines()[0].rfind("immediate cc=", 0), 0u);
  EXPECT_EQ(capture.lines()[1].rfind("grouped cb=", 0), 0u);
}
