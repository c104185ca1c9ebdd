#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

#include "scnf/common/error.hpp"
#include "scnf/trace/trace.hpp"

using namespace scnf;
using namespace scnf::trace;

namespace {

std::string random_string(std::mt19937_64& rng, bool allow_empty) {
  static const std::string alphabet = "abcXYZ019._/-:%# \t,\n\xff";
  std::uniform_int_distribution<int> len(allow_empty ? 0 : 1, 6);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) s.push_back(alphabet[pick(rng)]);
  return s;
}

TraceRecord random_record(std::mt19937_64& rng) {
  TraceRecord r;
  r.kind = static_cast<RecordKind>(rng() % 5);
  r.seq = rng() % 1000000;
  if (r.kind == RecordKind::Edge) {
    r.from = rng();
    r.to = rng();
    return r;
  }
  r.process = static_cast<model::ProcessId>(rng() % 300);
  r.t_start = static_cast<sim::SimTime>(rng() % 1'000'000'000'000);
  r.t_end = r.t_start + static_cast<sim::SimTime>(rng() % 1000);
  const std::vector<std::string> flag_pool = {"undef", "pfs", "owner-3", "x_1"};
  for (int i = 0, n = static_cast<int>(rng() % 3); i < n; ++i) r.flags.push_back(flag_pool[rng() % flag_pool.size()]);
  switch (r.kind) {
    case RecordKind::Write:
    case RecordKind::Read:
      r.file = random_string(rng, false);
      r.offset = rng() % (1ULL << 40);
      r.size = 1 + rng() % (1ULL << 24);
      break;
    case RecordKind::Sync:
      r.file = random_string(rng, false);
      r.name = random_string(rng, false);
      break;
    case RecordKind::Primitive:
      r.file = random_string(rng, true);
      r.name = random_string(rng, false);
      r.offset = rng() % 4096;
      r.size = rng() % 4096;
      break;
    case RecordKind::Edge:
      break;
  }
  return r;
}

}  // namespace

TEST_CASE("encode examples") {
  TraceRecord w;
  w.kind = RecordKind::Write;
  w.seq = 3;
  w.process = 1;
  w.file = "out.dat";
  w.offset = 4096;
  w.size = 8;
  w.t_start = 10;
  w.t_end = 20;
  CHECK(encode(w) == "W 3 1 out.dat 4096 8 10 20 -");

  TraceRecord s;
  s.kind = RecordKind::Sync;
  s.seq = 4;
  s.file = "my file";
  s.name = "commit";
  s.flags = {"a", "b"};
  CHECK(encode(s) == "S 4 0 my%20file commit 0 0 a,b");

  TraceRecord e;
  e.kind = RecordKind::Edge;
  e.seq = 5;
  e.from = 3;
  e.to = 4;
  CHECK(encode(e) == "E 5 3 4");

  TraceRecord dash;
  dash.kind = RecordKind::Primitive;
  dash.name = "bfs_open";
  dash.file = "-";
  CHECK(encode(dash) == "P 0 0 %2D bfs_open 0 0 0 0 -");
  CHECK(decode(encode(dash)) == dash);
  dash.file.clear();
  CHECK(encode(dash) == "P 0 0 - bfs_open 0 0 0 0 -");
  CHECK(decode(encode(dash)) == dash);
}

TEST_CASE("invalid records are rejected on encode") {
  TraceRecord w;
  w.kind = RecordKind::Write;
  w.file = "f";
  w.size = 0;
  CHECK_THROWS_AS(encode(w), Error);
  w.size = 1;
  w.flags = {"has space"};
  CHECK_THROWS_AS(encode(w), Error);
  w.flags = {};
  w.t_start = 5;
  w.t_end = 4;
  CHECK_THROWS_AS(encode(w), Error);
}

TEST_CASE("round trip of random records") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 20000; ++i) {
    const auto r = random_record(rng);
    const auto line = encode(r);
    CHECK(line.find('\n') == std::string::npos);
    const auto back = decode(line);
    REQUIRE(back == r);
    CHECK(encode(back) == line);
  }
}

TEST_CASE("decode errors") {
  for (const char* bad : {"", "X 1 2", "W 1 0 f 0 0 0 0 -", "W 1 0 f 0 1 0 0", "W a 0 f 0 1 0 0 -",
                          "W 1 0 f%2 0 1 0 0 -", "W 1 0 f 0 1 9 3 -", "S 1 0 f - 0 0 -", "E 1 2",
                          "W 1 0 f 0 1 0 0 a,,b", "W 1 0 f -1 1 0 0 -", "W 1 0 f 0 1 0 0 -  "}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(decode(bad), Error);
  }
}

TEST_CASE("whole files") {
  SUBCASE("empty file gives an empty trace") {
    CHECK(parse_text("").empty());
    CHECK(to_execution_trace(parse_text("")).size() == 0);
    CHECK(parse_text(header_line() + "\n").empty());
  }
  SUBCASE("version handling") {
    CHECK_NOTHROW(parse_text("scnftrace 1.7\n"));
    CHECK_THROWS_AS(parse_text("scnftrace 2.0\n"), Error);
    CHECK_THROWS_AS(parse_text("W 0 0 f 0 1 0 0 -\n"), Error);
  }
  SUBCASE("errors carry line numbers") {
    try {
      parse_text("scnftrace 1.0\nW 0 0 f 0 1 0 0 -\nW 1 0 f 0 1\n", "t.trace");
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ParseError);
      CHECK(std::string(e.what()).find("t.trace:3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_text("scnftrace 1.0\nW 5 0 f 0 1 0 0 -\nW 5 0 f 0 1 0 0 -\n"), Error);
  }
  SUBCASE("dangling so edge names the missing op") {
    const auto recs = parse_text("scnftrace 1.0\nW 0 0 f 0 8 0 1 -\nR 1 1 f 0 8 2 3 -\nE 2 0 17\n");
    try {
      to_execution_trace(recs);
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ParseError);
      CHECK(std::string(e.what()).find("17") != std::string::npos);
    }
  }
  SUBCASE("cycles are rejected") {
    const auto recs = parse_text(
        "scnftrace 1.0\nS 0 0 f commit 0 0 -\nS 1 0 f commit 0 0 -\nS 2 1 f commit 0 0 -\nS 3 1 f commit 0 0 -\n"
        "E 4 1 2\nE 5 3 0\n");
    try {
      to_execution_trace(recs);
      FAIL("expected cycle");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::CyclicOrder);
    }
  }
  SUBCASE("file round trip") {
    std::mt19937_64 rng(7);
    std::vector<TraceRecord> recs;
    for (std::uint64_t i = 0; i < 200; ++i) {
      auto r = random_record(rng);
      r.seq = i * 3 + 1;
      recs.push_back(r);
    }
    const auto path = std::filesystem::temp_directory_path() / "scnf_trace_test.trace";
    write_file(path, recs);
    CHECK(read_file(path) == recs);
    std::filesystem::remove(path);
  }
}

TEST_CASE("recorder") {
  TraceRecorder rec;
  const auto w = rec.data(0, RecordKind::Write, "f", 0, 16, 0, 5);
  const auto c = rec.sync(0, "commit", "f", 5, 9);
  rec.primitive(0, "bfs_attach_file", "f", 0, 0, 5, 9);
  rec.barrier({0, 1, 2});
  const auto r1 = rec.data(1, RecordKind::Read, "f", 0, 16, 10, 12);
  rec.add_pending(2, r1);
  const auto r2 = rec.data(2, RecordKind::Read, "f", 0, 8, 13, 14, {"pfs"});
  CHECK(w == 0);
  CHECK(c == 1);
  CHECK(r1 == 3);
  CHECK(*rec.last_op(0) == c);
  CHECK_FALSE(rec.last_op(7));

  const auto text = to_text(rec.records());
  CHECK(parse_text(text) == rec.records());
  const auto trace = to_execution_trace(rec.records());
  CHECK(trace.size() == 4);
  // Barrier edge c -> r1 and c -> r2, explicit edge r1 -> r2.
  std::vector<model::SoEdge> expect = {{c, r1}, {c, r2}, {r1, r2}};
  auto got = trace.so();
  std::sort(got.begin(), got.end(), [](auto a, auto b) { return std::pair(a.from, a.to) < std::pair(b.from, b.to); });
  CHECK(got == expect);
  model::HbRelation hb(trace);
  CHECK(hb.before(trace.index_of(w), trace.index_of(r2)));
}
