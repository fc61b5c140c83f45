// Line-oriented file formats for automata, runs and words. '#' starts a comment.
//
//   kcounters <k>
//   alphabet <tok> ...
//   states <id> ...
//   initial <id>
//   accepting <id> ...          (Büchi)  or  table <id> ...  (Muller, repeated)
//   trans <src> <letter|-> <guardbits> <dst> <d1> ... <dk>
//
// With k = 0 the guard field is omitted. Runs:
//
//   run
//   start <state> <c1> ... <ck>
//   step <letter|-> <transition index> <state> <c1> ... <ck>
//
// Words: zero or more `coded theta:<S>` / `coded h:<p1,p2,...>` / `coded phi:<L>`
// lines (outermost first), one `lasso <spoke> | <cycle>` line, optional `prefix <n>`.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kcounter/machine.hpp"
#include "kcounter/omega_words.hpp"

namespace kcounter {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

using AnyAutomaton = std::variant<BuchiAutomaton, MullerAutomaton>;

AnyAutomaton read_automaton(std::istream& in);
BuchiAutomaton read_buchi(std::istream& in);
void write_automaton(std::ostream& out, const BuchiAutomaton& b);
void write_automaton(std::ostream& out, const MullerAutomaton& m);

Run read_run(std::istream& in, const CounterMachine& machine);
void write_run(std::ostream& out, const Run& run, const CounterMachine& machine);

struct WordFile {
  std::vector<CodingSpec> chain;
  LassoWord lasso;
  std::optional<std::size_t> prefix;
};

WordFile read_word(std::istream& in);
void write_word(std::ostream& out, const WordFile& w);
/// Letters of the coded word, or of the lasso itself when the chain is empty.
Word materialize(const WordFile& w, std::size_t n);

/// Whole-file helpers; throw Error when the file cannot be opened.
AnyAutomaton load_automaton(const std::string& path);
BuchiAutomaton load_buchi(const std::string& path);
void save_automaton(const std::string& path, const BuchiAutomaton& b);
Run load_run(const std::string& path, const CounterMachine& machine);
void save_run(const std::string& path, const Run& run, const CounterMachine& machine);
WordFile load_word(const std::string& path);

}  // namespace kcounter
