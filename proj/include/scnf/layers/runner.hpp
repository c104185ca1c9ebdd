#pragma once

#include <vector>

#include "scnf/layers/layer.hpp"
#include "scnf/model/program.hpp"
#include "scnf/sim/config.hpp"
#include "scnf/trace/trace.hpp"

namespace scnf::layers {

// The program plus an epilogue that makes final file contents observable:
// every process releases each file it wrote (commit or session_close; no-op
// for POSIX), then one extra observer process acquires (session_open under
// SessionFS) and reads each written file from offset 0 to its highest written
// byte. Every process's last statement is so-ordered before the observer.
model::Program with_epilogue(const model::Program& program, LayerKind kind);

struct ProgramRun {
  // reads: the original program's reads; files: what the observer read.
  model::Outcome outcome;
  std::vector<trace::TraceRecord> trace;
  sim::SimTime end = 0;
};

// Executes with_epilogue(program, kind) on a fresh cluster (one node per
// process) and collects the outcome. so edges are enforced: a statement
// starts only after all its so predecessors completed.
ProgramRun run_program(const model::Program& program, LayerKind kind, const sim::SimConfig& config = {});

// The program a trace recorded: W/R/S records become statements of their
// process (processes renumbered densely in id order, statements in seq
// order), E records become so edges, P records are dropped. Writes get
// distinct non-zero fill values. Throws ParseError on dangling edges.
model::Program program_from_trace(const std::vector<trace::TraceRecord>& records);

}  // namespace scnf::layers
