#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "choimarg/conic.hpp"
#include "choimarg/errors.hpp"

namespace choimarg {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix(std::ostringstream& out, int matno, std::vector<Entry> entries) {
  for (auto& e : entries)
    if (e.row > e.col) std::swap(e.row, e.col);
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.block, a.row, a.col) < std::tie(b.block, b.row, b.col);
  });
  for (const auto& e : entries)
    out << matno << ' ' << e.block + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' '
        << num(e.value) << '\n';
}

// Splits the data part of a line into tokens; SDPA allows ',', '(', ')',
// '{' and '}' as separators and '"' or '*' to start a comment.
std::vector<std::string> tokens(const std::string& line) {
  std::string clean;
  for (char c : line) {
    if (c == '"' || c == '*') break;
    clean += (c == ',' || c == '(' || c == ')' || c == '{' || c == '}') ? ' ' : c;
  }
  std::istringstream in(clean);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

template <class T>
T parse_number(const std::string& tok, std::size_t line) {
  T value{};
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParseError("bad number '" + tok + "'", line);
  return value;
}

}  // namespace

std::string to_sdpa(const ConicProgram& prog) {
  prog.validate();
  std::ostringstream out;
  out << "\"choimarg conic program\n";
  for (std::size_t k = 0; k < prog.blocks.size(); ++k)
    out << "\"block " << k + 1 << ' ' << prog.blocks[k].name << '\n';
  out << prog.constraints.size() << '\n' << prog.blocks.size() << '\n';
  for (std::size_t k = 0; k < prog.blocks.size(); ++k) {
    const Block& b = prog.blocks[k];
    out << (k ? " " : "") << (b.kind == BlockKind::Diagonal ? -b.size : b.size);
  }
  out << '\n';
  for (std::size_t i = 0; i < prog.constraints.size(); ++i)
    out << (i ? " " : "") << num(prog.constraints[i].rhs);
  out << '\n';
  write_matrix(out, 0, prog.objective);
  for (std::size_t i = 0; i < prog.constraints.size(); ++i)
    write_matrix(out, static_cast<int>(i) + 1, prog.constraints[i].entries);
  return out.str();
}

void export_sdpa(const ConicProgram& prog, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << to_sdpa(prog);
  if (!f) throw Error("write to '" + path + "' failed");
}

ConicProgram parse_sdpa(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  // Block names survive only through our own comment lines.
  std::map<int, std::string> names;
  auto remember_name = [&](const std::string& l) {
    if (l.rfind("\"block ", 0) != 0) return;
    std::istringstream ls(l.substr(7));
    int k = 0;
    if (ls >> k) {
      ls.get();
      std::string name;
      std::getline(ls, name);
      names[k] = name;
    }
  };

  // Header values may be spread over lines; collect tokens until enough.
  auto next_tokens = [&](std::size_t want, std::size_t& at_line) {
    std::vector<std::string> got;
    while (got.size() < want) {
      if (!std::getline(in, line)) throw ParseError("unexpected end of file", lineno + 1);
      ++lineno;
      remember_name(line);
      if (got.empty()) at_line = lineno;
      for (auto& t : tokens(line)) got.push_back(std::move(t));
    }
    if (got.size() > want) throw ParseError("too many values", lineno);
    return got;
  };

  std::size_t at = 0;
  const int m = parse_number<int>(next_tokens(1, at)[0], at);
  if (m < 0) throw ParseError("negative constraint count", at);
  const int nblocks = parse_number<int>(next_tokens(1, at)[0], at);
  if (nblocks <= 0) throw ParseError("block count must be positive", at);

  ConicProgram prog;
  for (const auto& t : next_tokens(static_cast<std::size_t>(nblocks), at)) {
    const int s = parse_number<int>(t, at);
    if (s == 0) throw ParseError("zero block size", at);
    const int k = static_cast<int>(prog.blocks.size()) + 1;
    prog.blocks.push_back({names.count(k) ? names[k] : "b" + std::to_string(k), std::abs(s),
                           s < 0 ? BlockKind::Diagonal : BlockKind::Psd});
  }
  prog.constraints.resize(m);
  if (m > 0) {
    const auto rhs = next_tokens(static_cast<std::size_t>(m), at);
    for (int i = 0; i < m; ++i) prog.constraints[i].rhs = parse_number<double>(rhs[i], at);
  }

  std::map<std::tuple<int, int, int, int>, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (t.size() != 5) throw ParseError("expected 'matno blkno i j value'", lineno);
    const int matno = parse_number<int>(t[0], lineno);
    const int blk = parse_number<int>(t[1], lineno) - 1;
    const int i = parse_number<int>(t[2], lineno) - 1;
    const int j = parse_number<int>(t[3], lineno) - 1;
    const double v = parse_number<double>(t[4], lineno);
    if (matno < 0 || matno > m) throw ParseError("matrix number out of range", lineno);
    if (blk < 0 || blk >= nblocks) throw ParseError("block number out of range", lineno);
    const Block& b = prog.blocks[blk];
    if (i < 0 || j < 0 || i >= b.size || j >= b.size)
      throw ParseError("index outside block", lineno);
    if (i > j) throw ParseError("entry below the diagonal; only the upper triangle is allowed",
                                lineno);
    if (b.kind == BlockKind::Diagonal && i != j)
      throw ParseError("off-diagonal entry in a diagonal block", lineno);
    // A position given twice with different values cannot describe a
    // symmetric matrix unambiguously.
    auto [it, fresh] = seen.try_emplace({matno, blk, i, j}, lineno);
    if (!fresh) throw ParseError("entry repeats line " + std::to_string(it->second), lineno);
    Entry e{blk, i, j, v};
    if (matno == 0)
      prog.objective.push_back(e);
    else
      prog.constraints[matno - 1].entries.push_back(e);
  }
  return prog;
}

ConicProgram import_sdpa(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_sdpa(buf.str());
}

}  // namespace choimarg
