#include "scnf/model/model_def.hpp"

#include <sstream>

#include "scnf/common/error.hpp"

namespace scnf::model {

namespace {

bool parse_edge(std::string tok, Edge& out) {
  for (std::string_view prefix : {"->", "→"}) {
    if (tok.rfind(prefix, 0) == 0) tok.erase(0, prefix.size());
  }
  if (tok == "po") {
    out = Edge::Po;
    return true;
  }
  if (tok == "hb") {
    out = Edge::Hb;
    return true;
  }
  return false;
}

}  // namespace

MscPattern MscPattern::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> toks;
  for (std::string t; in >> t;) toks.push_back(t);
  if (toks.empty() || toks.size() % 2 == 0) {
    throw Error(Errc::InvalidArgument, "MSC must alternate edge and op and start/end with an edge: " +
                                           std::string(text));
  }
  MscPattern p;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i % 2 == 0) {
      Edge e;
      if (!parse_edge(toks[i], e)) throw Error(Errc::InvalidArgument, "bad MSC edge '" + toks[i] + "'");
      p.edges.push_back(e);
    } else {
      p.ops.push_back(toks[i]);
    }
  }
  return p;
}

std::string to_string(const MscPattern& p) {
  std::string out;
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    if (i) out += ' ';
    out += p.edges[i] == Edge::Po ? "->po" : "->hb";
    if (i < p.ops.size()) out += " " + p.ops[i];
  }
  return out;
}

void ModelDef::validate() const {
  for (const auto& p : msc) {
    if (p.edges.size() != p.ops.size() + 1) {
      throw Error(Errc::InvalidArgument, name + ": MSC needs k+1 edges for k ops");
    }
    for (const auto& op : p.ops) {
      if (!sync_ops.contains(op)) throw Error(Errc::InvalidArgument, name + ": MSC op '" + op + "' not in S");
    }
  }
}

ModelDef load_builtin_model(std::string_view name) {
  ModelDef m;
  m.name = std::string(name);
  if (name == "posix") {
    m.msc = {MscPattern::parse("hb")};
  } else if (name == "commit") {
    // The commit must be issued by the writer.
    m.sync_ops = {"commit"};
    m.msc = {MscPattern::parse("po commit hb")};
  } else if (name == "commit-relaxed") {
    m.sync_ops = {"commit"};
    m.msc = {MscPattern::parse("hb commit hb")};
  } else if (name == "session") {
    m.sync_ops = {"session_close", "session_open"};
    m.msc = {MscPattern::parse("po session_close hb session_open po")};
  } else if (name == "mpiio") {
    m.sync_ops = {"MPI_File_sync", "MPI_File_close", "MPI_File_open"};
    for (const char* first : {"MPI_File_close", "MPI_File_sync"}) {
      for (const char* second : {"MPI_File_open", "MPI_File_sync"}) {
        m.msc.push_back(MscPattern::parse(std::string("po ") + first + " hb " + second + " po"));
      }
    }
  } else {
    throw Error(Errc::UnknownModel, "no built-in model named '" + std::string(name) + "'");
  }
  m.validate();
  return m;
}

std::vector<std::string> builtin_model_names() {
  return {"posix", "commit", "commit-relaxed", "session", "mpiio"};
}

}  // namespace scnf::model
