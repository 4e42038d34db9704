#pragma once
// Textual assembler for hand-written machine programs, one transition per
// line. Used by tests and by the CLI to load samplers.
//
//   # accept exactly 101
//   states 4
//   0 1 * -> goto 1 in=R
//   1 0 * -> goto 2 in=R
//   2 1 * -> goto 3 in=R
//   3 $ * -> accept
//
// Cells: `<state> <input: 0|1|$|*> <work: 0|1|*> -> <action>` with actions
//   accept | reject
//   goto <next> [write=0|1] [in=L|S|R] [work=L|S|R]
//   output <bit> goto <next> [in=..] [work=..]
//   oracle goto <next> [in=..] [work=..]
// Earlier lines win; unspecified cells reject. Defaults: write=0, in=S,
// work=S.

#include <sstream>
#include <string>
#include <vector>

#include "machine.hpp"

namespace sbstat {

struct AssembleResult {
  std::optional<Program> program;
  std::string error;
};

namespace detail {

inline bool parse_move(const std::string& s, int8_t* out) {
  if (s == "L") *out = -1;
  else if (s == "S") *out = 0;
  else if (s == "R") *out = +1;
  else return false;
  return true;
}

}  // namespace detail

inline AssembleResult assemble(const std::string& text) {
  auto fail = [](int line_no, const std::string& msg) {
    AssembleResult r;
    r.error = "line " + std::to_string(line_no) + ": " + msg;
    return r;
  };

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int q = -1;
  TransitionTable table;
  std::vector<bool> set_cell;

  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;

    if (tok == "states") {
      if (q >= 0) return fail(line_no, "duplicate states directive");
      if (!(ls >> q) || q < 1 || q > kMaxStates)
        return fail(line_no, "states must be in [1," + std::to_string(kMaxStates) + "]");
      table = TransitionTable(q);
      set_cell.assign(static_cast<size_t>(q) * 6, false);
      continue;
    }
    if (q < 0) return fail(line_no, "states directive must come first");

    int state;
    try {
      state = std::stoi(tok);
    } catch (...) {
      return fail(line_no, "bad state: " + tok);
    }
    if (state < 0 || state >= q) return fail(line_no, "state out of range");

    std::string insym, worksym, arrow, action;
    if (!(ls >> insym >> worksym >> arrow >> action) || arrow != "->")
      return fail(line_no, "expected '<state> <in> <work> -> <action>'");

    std::vector<int> syms, works;
    if (insym == "*") syms = {0, 1, 2};
    else if (insym == "0") syms = {0};
    else if (insym == "1") syms = {1};
    else if (insym == "$") syms = {2};
    else return fail(line_no, "input symbol must be 0, 1, $ or *");
    if (worksym == "*") works = {0, 1};
    else if (worksym == "0") works = {0};
    else if (worksym == "1") works = {1};
    else return fail(line_no, "work symbol must be 0, 1 or *");

    Transition t;
    if (action == "accept") {
      t = make_accept();
    } else if (action == "reject") {
      t = make_reject();
    } else {
      if (action == "goto") {
        t.act = Act::Continue;
      } else if (action == "output") {
        t.act = Act::Output;
        int b;
        std::string g;
        if (!(ls >> b) || (b != 0 && b != 1)) return fail(line_no, "output needs a bit");
        if (!(ls >> g) || g != "goto") return fail(line_no, "output <bit> goto <next>");
        t.write = static_cast<uint8_t>(b);
      } else if (action == "oracle") {
        std::string g;
        if (!(ls >> g) || g != "goto") return fail(line_no, "oracle goto <next>");
        t.act = Act::Oracle;
      } else {
        return fail(line_no, "unknown action: " + action);
      }
      int next;
      if (!(ls >> next) || next < 0 || next >= q) return fail(line_no, "bad goto target");
      t.next = static_cast<uint16_t>(next);
      std::string opt;
      while (ls >> opt) {
        auto eq = opt.find('=');
        if (eq == std::string::npos) return fail(line_no, "bad option: " + opt);
        std::string key = opt.substr(0, eq), val = opt.substr(eq + 1);
        if (key == "write" && t.act == Act::Continue) {
          if (val != "0" && val != "1") return fail(line_no, "write must be 0 or 1");
          t.write = static_cast<uint8_t>(val[0] - '0');
        } else if (key == "in") {
          if (!detail::parse_move(val, &t.imove)) return fail(line_no, "in must be L, S or R");
        } else if (key == "work") {
          if (!detail::parse_move(val, &t.wmove)) return fail(line_no, "work must be L, S or R");
        } else {
          return fail(line_no, "bad option: " + opt);
        }
      }
    }

    for (int a : syms)
      for (int w : works) {
        size_t idx = static_cast<size_t>(state) * 6 + a * 2 + w;
        if (set_cell[idx]) continue;  // earlier lines win
        set_cell[idx] = true;
        table.at(state, a, w) = t;
      }
  }
  if (q < 0) return fail(0, "missing states directive");

  auto p = Program::from_table(table);
  if (!p) {
    AssembleResult r;
    r.error = "table not encodable";
    return r;
  }
  AssembleResult r;
  r.program = *p;
  return r;
}

inline std::string disassemble(const TransitionTable& table) {
  std::ostringstream out;
  out << "states " << table.q << "\n";
  const char* syms = "01$";
  auto move_name = [](int8_t m) { return m < 0 ? "L" : (m == 0 ? "S" : "R"); };
  for (int s = 0; s < table.q; ++s)
    for (int a = 0; a < 3; ++a)
      for (int w = 0; w < 2; ++w) {
        const Transition& t = table.at(s, a, w);
        out << s << " " << syms[a] << " " << w << " -> ";
        switch (t.act) {
          case Act::Accept: out << "accept"; break;
          case Act::Reject: out << "reject"; break;
          case Act::Continue:
            out << "goto " << t.next << " write=" << int(t.write) << " in=" << move_name(t.imove)
                << " work=" << move_name(t.wmove);
            break;
          case Act::Output:
            out << "output " << int(t.write) << " goto " << t.next << " in=" << move_name(t.imove)
                << " work=" << move_name(t.wmove);
            break;
          case Act::Oracle:
            out << "oracle goto " << t.next << " in=" << move_name(t.imove)
                << " work=" << move_name(t.wmove);
            break;
        }
        out << "\n";
      }
  return out.str();
}

}  // namespace sbstat
