#include "scnf/trace/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "scnf/common/error.hpp"

namespace scnf::trace {

namespace {

bool plain_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
         c == '/' || c == '-' || c == ':' || c == '@' || c == '+' || c == '=' || c == '~';
}

// "-" stands for the empty string, so a literal "-" is escaped.
std::string escape(const std::string& s) {
  if (s.empty()) return "-";
  if (s == "-") return "%2D";
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (plain_char(static_cast<char>(c))) {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string unescape(std::string_view s) {
  if (s == "-") return {};
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      if (i + 2 >= s.size()) throw Error(Errc::ParseError, "truncated escape");
      const int hi = hex_value(s[i + 1]);
      const int lo = hex_value(s[i + 2]);
      if (hi < 0 || lo < 0) throw Error(Errc::ParseError, "bad escape in '" + std::string(s) + "'");
      out.push_back(static_cast<char>(hi * 16 + lo));
      i += 2;
    } else if (plain_char(s[i])) {
      out.push_back(s[i]);
    } else {
      throw Error(Errc::ParseError, "unexpected character in '" + std::string(s) + "'");
    }
  }
  return out;
}

bool flag_ok(const std::string& f) {
  return !f.empty() && std::all_of(f.begin(), f.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  }) && f != "-";
}

std::string encode_flags(const std::vector<std::string>& flags) {
  if (flags.empty()) return "-";
  std::string out;
  for (const auto& f : flags) {
    if (!flag_ok(f)) throw Error(Errc::InvalidArgument, "bad trace flag '" + f + "'");
    if (!out.empty()) out.push_back(',');
    out += f;
  }
  return out;
}

std::vector<std::string> decode_flags(std::string_view s) {
  std::vector<std::string> out;
  if (s == "-") return out;
  while (true) {
    const auto comma = s.find(',');
    std::string f(s.substr(0, comma));
    if (!flag_ok(f)) throw Error(Errc::ParseError, "bad flag list");
    out.push_back(std::move(f));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return out;
}

template <typename T>
T parse_num(std::string_view tok, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw Error(Errc::ParseError, std::string("bad ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto sp = line.find(' ', pos);
    out.push_back(line.substr(pos, sp == std::string_view::npos ? std::string_view::npos : sp - pos));
    if (sp == std::string_view::npos) break;
    pos = sp + 1;
  }
  return out;
}

void validate(const TraceRecord& r) {
  auto fail = [](const std::string& m) { throw Error(Errc::InvalidArgument, "trace record: " + m); };
  if (r.kind != RecordKind::Edge) {
    if (r.t_start < 0 || r.t_end < r.t_start) fail("timestamps must satisfy 0 <= t_start <= t_end");
  }
  switch (r.kind) {
    case RecordKind::Write:
    case RecordKind::Read:
      if (r.file.empty()) fail("data record without file");
      if (r.size == 0) fail("data record of size 0");
      if (r.offset > std::numeric_limits<std::uint64_t>::max() - (r.size - 1)) fail("range overflows");
      break;
    case RecordKind::Sync:
      if (r.file.empty()) fail("sync record without file");
      if (r.name.empty()) fail("sync record without name");
      break;
    case RecordKind::Primitive:
      if (r.name.empty()) fail("primitive record without name");
      break;
    case RecordKind::Edge:
      break;
  }
}

}  // namespace

std::string encode(const TraceRecord& r) {
  validate(r);
  std::ostringstream out;
  switch (r.kind) {
    case RecordKind::Write:
    case RecordKind::Read:
      out << (r.kind == RecordKind::Write ? 'W' : 'R') << ' ' << r.seq << ' ' << r.process << ' ' << escape(r.file)
          << ' ' << r.offset << ' ' << r.size << ' ' << r.t_start << ' ' << r.t_end << ' ' << encode_flags(r.flags);
      break;
    case RecordKind::Sync:
      out << "S " << r.seq << ' ' << r.process << ' ' << escape(r.file) << ' ' << escape(r.name) << ' ' << r.t_start
          << ' ' << r.t_end << ' ' << encode_flags(r.flags);
      break;
    case RecordKind::Primitive:
      out << "P " << r.seq << ' ' << r.process << ' ' << escape(r.file) << ' ' << escape(r.name) << ' ' << r.offset
          << ' ' << r.size << ' ' << r.t_start << ' ' << r.t_end << ' ' << encode_flags(r.flags);
      break;
    case RecordKind::Edge:
      out << "E " << r.seq << ' ' << r.from << ' ' << r.to;
      break;
  }
  return out.str();
}

TraceRecord decode(std::string_view line) {
  const auto tok = split(line);
  auto need = [&](std::size_t n) {
    if (tok.size() != n) {
      throw Error(Errc::ParseError, "expected " + std::to_string(n) + " fields, got " + std::to_string(tok.size()));
    }
  };
  TraceRecord r;
  const std::string_view k = tok[0];
  if (k == "W" || k == "R") {
    need(9);
    r.kind = k == "W" ? RecordKind::Write : RecordKind::Read;
    r.seq = parse_num<std::uint64_t>(tok[1], "seq");
    r.process = parse_num<model::ProcessId>(tok[2], "process");
    r.file = unescape(tok[3]);
    r.offset = parse_num<std::uint64_t>(tok[4], "offset");
    r.size = parse_num<std::uint64_t>(tok[5], "size");
    r.t_start = parse_num<sim::SimTime>(tok[6], "t_start");
    r.t_end = parse_num<sim::SimTime>(tok[7], "t_end");
    r.flags = decode_flags(tok[8]);
  } else if (k == "S") {
    need(8);
    r.kind = RecordKind::Sync;
    r.seq = parse_num<std::uint64_t>(tok[1], "seq");
    r.process = parse_num<model::ProcessId>(tok[2], "process");
    r.file = unescape(tok[3]);
    r.name = unescape(tok[4]);
    r.t_start = parse_num<sim::SimTime>(tok[5], "t_start");
    r.t_end = parse_num<sim::SimTime>(tok[6], "t_end");
    r.flags = decode_flags(tok[7]);
  } else if (k == "P") {
    need(10);
    r.kind = RecordKind::Primitive;
    r.seq = parse_num<std::uint64_t>(tok[1], "seq");
    r.process = parse_num<model::ProcessId>(tok[2], "process");
    r.file = unescape(tok[3]);
    r.name = unescape(tok[4]);
    r.offset = parse_num<std::uint64_t>(tok[5], "offset");
    r.size = parse_num<std::uint64_t>(tok[6], "size");
    r.t_start = parse_num<sim::SimTime>(tok[7], "t_start");
    r.t_end = parse_num<sim::SimTime>(tok[8], "t_end");
    r.flags = decode_flags(tok[9]);
  } else if (k == "E") {
    need(4);
    r.kind = RecordKind::Edge;
    r.seq = parse_num<std::uint64_t>(tok[1], "seq");
    r.from = parse_num<std::uint64_t>(tok[2], "from");
    r.to = parse_num<std::uint64_t>(tok[3], "to");
  } else {
    throw Error(Errc::ParseError, "unknown record kind '" + std::string(k) + "'");
  }
  try {
    validate(r);
  } catch (const Error& e) {
    throw Error(Errc::ParseError, e.what());
  }
  return r;
}

std::string header_line() {
  return "scnftrace " + std::to_string(kTraceMajor) + "." + std::to_string(kTraceMinor);
}

std::string to_text(const std::vector<TraceRecord>& records) {
  std::string out = header_line() + "\n";
  for (const auto& r : records) {
    out += encode(r);
    out.push_back('\n');
  }
  return out;
}

std::vector<TraceRecord> parse_text(std::string_view text, std::string_view source) {
  std::vector<TraceRecord> out;
  if (text.empty()) return out;
  std::size_t line_no = 0;
  bool header = false;
  std::optional<std::uint64_t> last_seq;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      const std::string_view magic = "scnftrace ";
      if (line.substr(0, magic.size()) != magic) throw Error(Errc::ParseError, where + "missing 'scnftrace' header");
      const auto ver = line.substr(magic.size());
      const auto dot = ver.find('.');
      int major = 0;
      try {
        major = parse_num<int>(ver.substr(0, dot), "version");
        if (dot != std::string_view::npos) parse_num<int>(ver.substr(dot + 1), "version");
      } catch (const Error&) {
        throw Error(Errc::ParseError, where + "bad version '" + std::string(ver) + "'");
      }
      if (major != kTraceMajor) {
        throw Error(Errc::ParseError, where + "unsupported trace version " + std::string(ver));
      }
      header = true;
      continue;
    }
    TraceRecord r;
    try {
      r = decode(line);
    } catch (const Error& e) {
      throw Error(Errc::ParseError, where + e.what());
    }
    if (last_seq && r.seq <= *last_seq) throw Error(Errc::ParseError, where + "seq does not increase");
    last_seq = r.seq;
    out.push_back(std::move(r));
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::vector<TraceRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
  out << to_text(records);
  if (!out) throw Error(Errc::InvalidArgument, "write failed for " + path.string());
}

std::vector<TraceRecord> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path.string());
}

model::ExecutionTrace to_execution_trace(const std::vector<TraceRecord>& records) {
  std::vector<model::StorageOp> ops;
  std::vector<model::SoEdge> so;
  std::set<std::uint64_t> ids;
  for (const auto& r : records) {
    if (r.kind == RecordKind::Edge) {
      so.push_back({r.from, r.to});
      continue;
    }
    if (r.kind == RecordKind::Primitive) continue;
    model::StorageOp op;
    op.id = r.seq;
    op.process = r.process;
    op.file = r.file;
    if (r.kind == RecordKind::Sync) {
      op.kind = model::OpKind::Sync;
      op.sync_name = r.name;
    } else {
      op.kind = r.kind == RecordKind::Write ? model::OpKind::Write : model::OpKind::Read;
      op.range = ByteRange::from_offset_size(r.offset, r.size);
    }
    ids.insert(op.id);
    ops.push_back(std::move(op));
  }
  for (const auto& e : so) {
    for (auto id : {e.from, e.to}) {
      if (!ids.count(id)) throw Error(Errc::ParseError, "so edge references missing op " + std::to_string(id));
    }
  }
  return model::ExecutionTrace(std::move(ops), std::move(so));
}

model::ExecutionTrace read_trace(const std::filesystem::path& path) { return to_execution_trace(read_file(path)); }

std::uint64_t TraceRecorder::push_op(TraceRecord r) {
  r.seq = next_seq_++;
  const auto id = r.seq;
  const auto proc = r.process;
  records_.push_back(std::move(r));
  last_op_[proc] = id;
  if (auto it = pending_.find(proc); it != pending_.end()) {
    auto froms = std::move(it->second);
    pending_.erase(it);
    std::sort(froms.begin(), froms.end());
    froms.erase(std::unique(froms.begin(), froms.end()), froms.end());
    for (auto f : froms) edge(f, id);
  }
  return id;
}

std::uint64_t TraceRecorder::data(model::ProcessId process, RecordKind kind, const std::string& file,
                                  std::uint64_t offset, std::uint64_t size, sim::SimTime t_start,
                                  sim::SimTime t_end, std::vector<std::string> flags) {
  if (kind != RecordKind::Read && kind != RecordKind::Write) {
    throw Error(Errc::InvalidArgument, "data record must be a read or a write");
  }
  TraceRecord r;
  r.kind = kind;
  r.process = process;
  r.file = file;
  r.offset = offset;
  r.size = size;
  r.t_start = t_start;
  r.t_end = t_end;
  r.flags = std::move(flags);
  validate(r);
  return push_op(std::move(r));
}

std::uint64_t TraceRecorder::sync(model::ProcessId process, const std::string& name, const std::string& file,
                                  sim::SimTime t_start, sim::SimTime t_end) {
  TraceRecord r;
  r.kind = RecordKind::Sync;
  r.process = process;
  r.file = file;
  r.name = name;
  r.t_start = t_start;
  r.t_end = t_end;
  validate(r);
  return push_op(std::move(r));
}

void TraceRecorder::primitive(model::ProcessId process, const std::string& name, const std::string& file,
                              std::uint64_t offset, std::uint64_t size, sim::SimTime t_start, sim::SimTime t_end) {
  TraceRecord r;
  r.kind = RecordKind::Primitive;
  r.seq = next_seq_++;
  r.process = process;
  r.file = file;
  r.name = name;
  r.offset = offset;
  r.size = size;
  r.t_start = t_start;
  r.t_end = t_end;
  validate(r);
  records_.push_back(std::move(r));
}

void TraceRecorder::edge(std::uint64_t from, std::uint64_t to) {
  TraceRecord r;
  r.kind = RecordKind::Edge;
  r.seq = next_seq_++;
  r.from = from;
  r.to = to;
  records_.push_back(std::move(r));
}

void TraceRecorder::add_pending(model::ProcessId process, std::uint64_t from) { pending_[process].push_back(from); }

void TraceRecorder::barrier(const std::vector<model::ProcessId>& participants) {
  for (auto p : participants) {
    for (auto q : participants) {
      if (p == q) continue;
      if (auto it = last_op_.find(q); it != last_op_.end()) pending_[p].push_back(it->second);
    }
  }
}

std::optional<std::uint64_t> TraceRecorder::last_op(model::ProcessId process) const {
  auto it = last_op_.find(process);
  if (it == last_op_.end()) return std::nullopt;
  return it->second;
}

}  // namespace scnf::trace
