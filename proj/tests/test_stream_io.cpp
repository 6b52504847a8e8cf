#include <gtest/gtest.h>

#include <sstream>

#include "persistminer/error.hpp"
#include "persistminer/stream_io.hpp"
#include "support/generators.hpp"

using namespace persistminer;

TEST(ParseUpdate, InsertionWithEmptyRelation) {
  EdgeUpdate u = parse_update("0.0,+,a,,b", 1);
  EXPECT_EQ(u.op, Op::Insert);
  EXPECT_EQ(u.src, "a");
  EXPECT_EQ(u.rel, "");
  EXPECT_EQ(u.dst, "b");
  EXPECT_DOUBLE_EQ(u.t, 0.0);
  EXPECT_FALSE(u.src_label.has_value());
}

TEST(ParseUpdate, Deletion) {
  EdgeUpdate u = parse_update("5.0,-,a,,b", 1);
  EXPECT_EQ(u.op, Op::Delete);
  EXPECT_DOUBLE_EQ(u.t, 5.0);
}

TEST(ParseUpdate, IntegerEpochAndLabels) {
  EdgeUpdate u = parse_update("1356998400,+,x,calls,y,red,blue\r", 3);
  EXPECT_DOUBLE_EQ(u.t, 1356998400.0);
  EXPECT_EQ(u.rel, "calls");
  EXPECT_EQ(u.src_label, "red");
  EXPECT_EQ(u.dst_label, "blue");
}

TEST(ParseUpdate, MalformedLinesNameLineAndField) {
  struct Case {
    const char* line;
    const char* field;
  };
  for (auto c : {Case{"abc,+,a,,b", "'t'"}, Case{"1,*,a,,b", "'op'"},
                 Case{"1,+,,,b", "'src'"}, Case{"-1,+,a,,b", "'t'"},
                 Case{"1,+,a,,", "'dst'"}}) {
    try {
      parse_update(c.line, 42);
      FAIL() << "accepted " << c.line;
    } catch (const StreamError& e) {
      EXPECT_EQ(e.line(), 42u);
      EXPECT_NE(std::string(e.what()).find("line 42"), std::string::npos) << e.what();
      EXPECT_NE(std::string(e.what()).find(c.field), std::string::npos) << e.what();
    }
  }
  EXPECT_THROW(parse_update("1,+,a,b", 1), StreamError);
  EXPECT_THROW(parse_update("1,+,a,,b,red", 1), StreamError);
}

TEST(StreamReader, SkipsCommentsAndTracksMeta) {
  std::istringstream in("# header\n1,+,a,,b\n\n2,+,b,,c\n2,-,a,,b\n");
  StreamReader r(in);
  int n = 0;
  while (r.next()) ++n;
  EXPECT_EQ(n, 3);
  EXPECT_EQ(r.meta().count, 3u);
  EXPECT_DOUBLE_EQ(r.meta().start_time, 1.0);
  EXPECT_DOUBLE_EQ(r.meta().end_time, 2.0);
}

TEST(StreamReader, OutOfOrderNamesBothTimestamps) {
  std::istringstream in("3.0,+,a,,b\n2.0,+,a,,b\n");
  StreamReader r(in);
  ASSERT_TRUE(r.next());
  try {
    r.next();
    FAIL();
  } catch (const StreamError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("out-of-order stream"), std::string::npos);
    EXPECT_NE(msg.find('3'), std::string::npos);
    EXPECT_NE(msg.find('2'), std::string::npos);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(StreamIo, RoundTripPreservesRandomStreams) {
  gen::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    gen::StreamShape shape;
    shape.n = gen::index(rng, 1, 200);
    shape.labels = trial % 2 == 0;
    Stream s = gen::random_stream(rng, shape);
    // Non-terminating fractions must survive formatting.
    for (auto& u : s) u.t += 1.0 / 3.0;
    std::stringstream buf;
    write_stream(buf, s);
    EXPECT_EQ(read_stream(buf), s);
  }
}

TEST(Synthetic, SingleUpdateStartsAtZero) {
  Stream s = generate_synthetic(1, 1.0, 2, 7);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s[0].t, 0.0);
  EXPECT_NE(s[0].src, s[0].dst);
}

TEST(Synthetic, DeterministicPerSeed) {
  std::stringstream a, b, c;
  write_stream(a, generate_synthetic(500, 3.0, 20, 99));
  write_stream(b, generate_synthetic(500, 3.0, 20, 99));
  write_stream(c, generate_synthetic(500, 3.0, 20, 100));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

TEST(Synthetic, LastTimestampMatchesExpectedSpan) {
  // 99 exponential gaps of mean 0.1 s: E[last] = 9.9 s, sd ~ 0.995 s per
  // stream, so the mean over 400 seeds has sd ~ 0.05 s.
  double sum = 0;
  const int seeds = 400;
  for (int seed = 0; seed < seeds; ++seed) {
    Stream s = generate_synthetic(100, 10.0, 50, seed);
    for (std::size_t i = 1; i < s.size(); ++i) ASSERT_GE(s[i].t, s[i - 1].t);
    sum += s.back().t;
  }
  EXPECT_NEAR(sum / seeds, 9.9, 0.25);
}

TEST(Synthetic, RejectsBadPreconditions) {
  EXPECT_THROW(generate_synthetic(0, 1, 2, 0), ConfigError);
  EXPECT_THROW(generate_synthetic(1, 0, 2, 0), ConfigError);
  EXPECT_THROW(generate_synthetic(1, 1, 1, 0), ConfigError);
}

TEST(TripStream, InsertDeletePairsInTimeOrder) {
  TripStreamOptions opts;
  opts.trips = 2000;
  opts.node_count = 50;
  opts.seed = 3;
  Stream s = generate_trip_stream(opts);
  ASSERT_EQ(s.size(), 4000u);
  std::size_t inserts = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) ASSERT_GE(s[i].t, s[i - 1].t);
    inserts += s[i].op == Op::Insert;
    EXPECT_NE(s[i].src, s[i].dst);
  }
  EXPECT_EQ(inserts, 2000u);
}
