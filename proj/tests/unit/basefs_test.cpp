#include <doctest.h>

#include <optional>
#include <vector>

#include "scnf/basefs/cluster.hpp"
#include "scnf/common/error.hpp"

using namespace scnf;
using namespace scnf::basefs;
using scnf::interval::GlobalInterval;
using scnf::sim::Task;

namespace {

std::vector<std::uint8_t> fill(std::size_t n, std::uint8_t v) { return std::vector<std::uint8_t>(n, v); }

// Runs `body` as the only simulated process and drains the world.
template <typename F>
void run(sim::World& w, F& body) {
  w.spawn("main", body());
  w.run_until_idle();
}

template <typename F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return Errc::InvalidArgument;
}

std::uint64_t server_rpcs(const sim::World& w, const Cluster& c) {
  return w.accounting(c.server().entity()).rpc_recv;
}

sim::SimConfig quiet() {
  sim::SimConfig cfg;
  cfg.ssd_op_latency = 0;
  return cfg;
}

}  // namespace

TEST_CASE("bfs_open / close / tell") {
  sim::World w;
  Cluster c(w, {1, 1});
  auto& a = c.client(0);
  auto body = [&]() -> Task<void> {
    auto h = co_await a.open("f");
    CHECK(a.tell(h) == 0);
    auto h2 = co_await a.open("f");
    co_await a.seek(h, 10, Whence::Set);
    CHECK(a.tell(h) == 10);
    CHECK(a.tell(h2) == 0);
    co_await a.close(h);
    auto h3 = co_await a.open("f");
    CHECK(a.tell(h3) == 0);
    co_await a.close(h2);
    co_await a.close(h3);
  };
  run(w, body);
  CHECK(server_rpcs(w, c) == 0);
}

TEST_CASE("closing twice is an error") {
  sim::World w;
  Cluster c(w, {1, 1});
  auto& a = c.client(0);
  std::optional<Errc> err;
  auto body = [&]() -> Task<void> {
    auto h = co_await a.open("f");
    co_await a.close(h);
    try {
      co_await a.close(h);
    } catch (const Error& e) {
      err = e.code();
    }
  };
  run(w, body);
  CHECK(err == Errc::ClosedHandle);
  CHECK(error_of([&] { (void)a.tell(FileHandle{0}); }) == Errc::ClosedHandle);
}

TEST_CASE("close discards unattached data but keeps attached data served") {
  sim::World w;
  Cluster c(w, {2, 1});
  auto& a = c.client(0);
  auto& b = c.client(1);
  const auto data = fill(8192, 7);
  std::vector<GlobalInterval> before, after;
  ReadResult got;
  auto body = [&]() -> Task<void> {
    auto h = co_await a.open("u");
    co_await a.write(h, data);
    co_await a.close(h);
    auto h2 = co_await a.open("u");
    before = co_await a.query_file(h2);
    CHECK(a.local_tree("u")->empty());

    auto g = co_await a.open("v");
    co_await a.write(g, data);
    co_await a.attach(g, 0, 8192);
    co_await a.close(g);
    auto bh = co_await b.open("v");
    got = co_await b.read(bh, 8192, a.id());
  };
  run(w, body);
  CHECK(before.empty());
  CHECK(got.bytes == data);
}

TEST_CASE("bfs_write cost, visibility and RPC count") {
  sim::World w(quiet());
  Cluster c(w, {1, 1});
  auto& a = c.client(0);
  const std::uint64_t size = 8u << 20;
  sim::SimTime elapsed = 0;
  ReadResult own;
  auto body = [&]() -> Task<void> {
    auto h = co_await a.open("f");
    const auto t0 = w.now();
    co_await a.write_size(h, size);
    elapsed = w.now() - t0;
    co_await a.seek(h, 0, Whence::Set);
    own = co_await a.read(h, 16, a.id());
  };
  run(w, body);
  CHECK(sim::to_seconds(elapsed) == doctest::Approx(8.0 * (1 << 20) / 1e9));
  CHECK(own.size == 16);
  CHECK(server_rpcs(w, c) == 0);
  CHECK(w.accounting(a.entity()).bytes_written_ssd == size);
}

TEST_CASE("read your own writes") {
  sim::World w;
  Cluster c(w, {1, 1});
  auto& a = c.client(0);
  std::vector<std::uint8_t> seen;
  const auto v1 = fill(10, 1);
  const auto v2 = fill(4, 2);
  auto body = [&]() -> Task<void> {
    auto h = co_await a.open("f");
    co_await a.write(h, v1);
    co_await a.seek(h, 3, Whence::Set);
    co_await a.write(h, v2);
    co_await a.seek(h, 0, Whence::Set);
    seen = (co_await a.read(h, 10, a.id())).bytes;
  };
  run(w, body);
  CHECK(seen == std::vector<std::uint8_t>{1, 1, 1, 2, 2, 2, 2, 1, 1, 1});
  CHECK(server_rpcs(w, c) == 0);
}

TEST_CASE("owner reads and NotOwner") {
  sim::World w;
  Cluster c(w, {2, 1});
  auto& a = c.client(0);
  auto& b = c.client(1);
  std::vector<std::uint8_t> data(100);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<std::uint8_t>(i);
  ReadResult got;
  std::optional<Errc> partial;
  auto body = [&]() -> Task<void> {
    auto ha = co_await a.open("f");
    co_await a.write(ha, data);
    co_await a.attach(ha, 0, 100);
    auto hb = co_await b.open("f");
    got = co_await b.read(hb, 100, a.id());

    auto ga = co_await a.open("g");
    co_await a.write(ga, data);
    co_await a.attach(ga, 0, 50);
    auto gb = co_await b.open("g");
    try {
      co_await b.read(gb, 100, a.id());
    } catch (const Error& e) {
      partial = e.code();
    }
    CHECK(b.tell(gb) == 0);
  };
  run(w, body);
  CHECK(got.bytes == data);
  CHECK(partial == Errc::NotOwner);
  // Conservation of client-to-client bytes, per pair.
  CHECK(w.c2c_sent() == w.owner_reads());
  CHECK(w.accounting(a.entity()).bytes_client_to_client == 100);
}

TEST_CASE("owner reads return the attached version, not a later local rewrite") {
  sim::World w;
  Cluster c(w, {2, 1});
  auto& a = c.client(0);
  auto& b = c.client(1);
  const auto v1 = fill(16, 1);
  const auto v2 = fill(16, 2);
  std::vector<std::uint8_t> seen, own;
  auto body = [&]() -> Task<void> {
    auto ha = co_await a.open("f");
    co_await a.write(ha, v1);
    co_await a.attach(ha, 0, 16);
    co_await a.seek(ha, 0, Whence::Set);
    co_await a.write(ha, v2);
    auto hb = co_await b.open("f");
    seen = (co_await b.read(hb, 16, a.id())).bytes;
    co_await a.seek(ha, 0, Whence::Set);
    own = (co_await a.read(ha, 16, a.id())).bytes;
    co_await a.attach_file(ha);
    co_await b.seek(hb, 0, Whence::Set);
    seen.insert(seen.end(), 0);
    auto again = (co_await b.read(hb, 16, a.id())).bytes;
    seen.insert(seen.end(), again.begin(), again.end());
  };
  run(w, body);
  std::vector<std::uint8_t> expect = v1;
  expect.push_back(0);
  expect.insert(expect.end(), v2.begin(), v2.end());
  CHECK(seen == expect);
  CHECK(own == v2);
}

TEST_CASE("PFS reads: zeros below EOF, undefined beyond") {
  sim::World w;
  Cluster c(w, {1, 1});
  auto& a = c.client(0);
  ReadResult r;
  auto body = [&]() -> Task<void> {
    auto h = co_await a.open("f");
    r = co_await a.read(h, 8, std::nullopt);
  };
  run(w, body);
  CHECK(r.bytes == fill(8, 0));
  CHECK(r.undefined);
  CHECK(w.accounting(a.entity()).bytes_read_ssd == 0);
}

TEST_CASE("attach semantics") {
  sim::World w;
  Cluster c(w, {2, 1});
  auto& a = c.client(0);
  auto& b = c.client(1);
  const auto d100 = fill(100, 1);
  std::optional<Errc> unwritten, twice;
  std::uint64_t rpcs_before_noop = 0, rpcs_after_noop = 0;
  std::vector<GlobalInterval> q, none;
  auto body = [&]() -> Task<void> {
    auto ha = co_await a.open("f");
    auto hb = co_await b.open("f");
    none = co_await b.query(hb, 0, 100);
    co_await a.write(ha, d100);
    co_await a.attach(ha, 0, 100);
    co_await b.seek(hb, 50, Whence::Set);
    co_await b.write(hb, d100);
    co_await b.attach(hb, 50, 100);
    q = co_await a.query(ha, 25, 50);
    try {
      co_await a.attach(ha, 100, 10);
    } catch (const Error& e) {
      unwritten = e.code();
    }
    try {
      co_await a.attach(ha, 0, 100);
    } catch (const Error& e) {
      twice = e.code();
    }
    auto g = co_await a.open("empty");
    rpcs_before_noop = server_rpcs(w, c);
    co_await a.attach_file(g);
    co_await a.detach_file(g);
    co_await a.flush_file(g);
    rpcs_after_noop = server_rpcs(w, c);
  };
  run(w, body);
  const ClientId A = a.id(), B = b.id();
  CHECK(c.server().query_file("f") ==
        std::vector<GlobalInterval>{{ByteRange(0, 49), A}, {ByteRange(50, 149), B}});
  CHECK(q == std::vector<GlobalInterval>{{ByteRange(25, 49), A}, {ByteRange(50, 74), B}});
  CHECK(none.empty());
  CHECK(unwritten == Errc::UnwrittenBytes);
  CHECK(twice == Errc::AlreadyAttached);
  CHECK(rpcs_after_noop == rpcs_before_noop);
  const auto& by_kind = w.accounting(c.server().entity()).rpc_recv_by_kind;
  CHECK(by_kind.at("attach") == 2);
  CHECK(by_kind.at("query") == 2);
}

TEST_CASE("attach_file sends one RPC for many writes") {
  sim::World w;
  Cluster c(w, {1, 1});
  auto& a = c.client(0);
  const auto d = fill(10, 3);
  auto body = [&]() -> Task<void> {
    auto h = co_await a.open("f");
    co_await a.write(h, d);
    co_await a.seek(h, 100, Whence::Set);
    co_await a.write(h, d);
    co_await a.attach_file(h);
  };
  run(w, body);
  CHECK(server_rpcs(w, c) == 1);
  CHECK(c.server().query_file("f").size() == 2);
  CHECK(c.file_size("f") == 110);
}

TEST_CASE("detach semantics") {
  sim::World w;
  Cluster c(w, {2, 1});
  auto& a = c.client(0);
  auto& b = c.client(1);
  const auto d = fill(100, 9);
  std::optional<Errc> never;
  std::optional<Errc> after_detach;
  bool empty_after_roundtrip = false;
  auto body = [&]() -> Task<void> {
    auto ha = co_await a.open("f");
    co_await a.write(ha, d);
    co_await a.attach(ha, 0, 100);
    co_await a.detach(ha, 0, 100);
    empty_after_roundtrip = c.server().query_file("f").empty();

    auto hb = co_await b.open("f");
    try {
      co_await b.read(hb, 100, a.id());
    } catch (const Error& e) {
      after_detach = e.code();
    }
    co_await a.attach(ha, 0, 100);
    co_await b.write(hb, d);
    co_await b.attach(hb, 0, 100);
    co_await a.detach(ha, 0, 100);  // overwritten by B: server no-op
    auto g = co_await a.open("g");
    try {
      co_await a.detach(g, 0, 10);
    } catch (const Error& e) {
      never = e.code();
    }
  };
  run(w, body);
  CHECK(empty_after_roundtrip);
  CHECK(after_detach == Errc::NotOwner);
  CHECK(c.server().query_file("f") == std::vector<GlobalInterval>{{ByteRange(0, 99), b.id()}});
  CHECK(never == Errc::NotAttached);
}

TEST_CASE("flush semantics") {
  sim::World w;
  Cluster c(w, {2, 1});
  auto& a = c.client(0);
  auto& b = c.client(1);
  const auto d = fill(64, 5);
  std::vector<std::uint8_t> from_pfs;
  std::vector<GlobalInterval> map_before, map_after;
  sim::SimTime noop_cost = -1;
  auto body = [&]() -> Task<void> {
    auto ha = co_await a.open("f");
    co_await a.write(ha, d);
    co_await a.attach(ha, 0, 64);
    map_before = c.server().query_file("f");
    co_await a.flush(ha, 0, 64);
    map_after = c.server().query_file("f");
    co_await a.detach(ha, 0, 64);
    auto hb = co_await b.open("f");
    from_pfs = (co_await b.read(hb, 64, std::nullopt)).bytes;
    auto g = co_await b.open("g");
    const auto t0 = w.now();
    co_await b.flush_file(g);
    noop_cost = w.now() - t0;
  };
  run(w, body);
  CHECK(from_pfs == d);
  CHECK(map_before == map_after);
  CHECK(noop_cost == 0);
  CHECK(c.pfs().size("g") == 0);
}

TEST_CASE("seek, tell and stat") {
  sim::World w;
  Cluster c(w, {1, 1});
  auto& a = c.client(0);
  std::uint64_t size = 0, end = 0, set = 99;
  std::optional<Errc> neg;
  std::uint64_t stat_rpcs = 0;
  const auto d = fill(100, 1);
  auto body = [&]() -> Task<void> {
    auto h = co_await a.open("f");
    set = co_await a.seek(h, 0, Whence::Set);
    co_await a.write(h, d);
    co_await a.attach(h, 0, 100);
    const auto before = server_rpcs(w, c);
    size = co_await a.stat(h);
    end = co_await a.seek(h, 5, Whence::End);
    stat_rpcs = server_rpcs(w, c) - before;
    CHECK(co_await a.seek(h, -5, Whence::Cur) == 100);
    try {
      co_await a.seek(h, -1, Whence::Set);
    } catch (const Error& e) {
      neg = e.code();
    }
    CHECK(a.tell(h) == 100);
  };
  run(w, body);
  CHECK(set == 0);
  CHECK(size == 100);
  CHECK(end == 105);
  CHECK(stat_rpcs == 2);
  CHECK(neg == Errc::NegativePosition);
}

TEST_CASE("size-only mode moves sizes without bytes") {
  sim::World w;
  Cluster c(w, {2, 1, false});
  auto& a = c.client(0);
  auto& b = c.client(1);
  ReadResult r;
  auto body = [&]() -> Task<void> {
    auto ha = co_await a.open("f");
    co_await a.write_size(ha, 1 << 20);
    co_await a.attach_file(ha);
    auto hb = co_await b.open("f");
    r = co_await b.read(hb, 1 << 20, a.id());
  };
  run(w, body);
  CHECK(r.size == (1u << 20));
  CHECK(r.bytes.empty());
}

TEST_CASE("kernel emits primitive trace records") {
  sim::World w;
  trace::TraceRecorder rec;
  Cluster c(w, {1, 1}, &rec);
  auto& a = c.client(0);
  const auto d = fill(4, 1);
  auto body = [&]() -> Task<void> {
    auto h = co_await a.open("f");
    co_await a.write(h, d);
    co_await a.attach_file(h);
    co_await a.close(h);
  };
  run(w, body);
  std::vector<std::string> names;
  for (const auto& r : rec.records()) names.push_back(r.name);
  CHECK(names == std::vector<std::string>{"bfs_open", "bfs_write", "bfs_attach_file", "bfs_close"});
  CHECK(rec.records()[1].size == 4);
  CHECK(trace::to_execution_trace(rec.records()).size() == 0);
}

TEST_CASE("concurrent attaches: server receipt order wins and one owner per byte") {
  sim::World w;
  Cluster c(w, {3, 1});
  auto writer = [&](model::ProcessId p, std::uint64_t off, std::uint8_t v) -> Task<void> {
    auto& cl = c.client(p);
    auto h = co_await cl.open("f");
    co_await cl.seek(h, static_cast<std::int64_t>(off), Whence::Set);
    const auto d = fill(100, v);
    co_await cl.write(h, d);
    co_await cl.attach_file(h);
  };
  w.spawn("w0", writer(0, 0, 1));
  w.spawn("w1", writer(1, 50, 2));
  w.spawn("w2", writer(2, 25, 3));
  w.run_until_idle();
  const auto map = c.server().query_file("f");
  for (std::size_t i = 1; i < map.size(); ++i) CHECK(map[i - 1].range.end < map[i].range.start);
  std::uint64_t covered = 0;
  for (const auto& iv : map) covered += iv.range.length();
  CHECK(covered == 150);
}
