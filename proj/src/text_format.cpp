#include "kcounter/text_format.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace kcounter {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

// Splits into whitespace-separated tokens, dropping comments and blank lines.
std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> out;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ss(raw);
    Line l{number, {}};
    for (std::string tok; ss >> tok;) l.tokens.push_back(tok);
    if (!l.tokens.empty()) out.push_back(std::move(l));
  }
  return out;
}

template <class T>
T parse_number(const Line& l, const std::string& tok, const char* what) {
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && tok[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) throw ParseError(l.number, std::string("bad ") + what + " '" + tok + "'");
  return value;
}

StateId parse_state(const Line& l, const CounterMachine& m, const std::string& tok) {
  auto s = m.state_id(tok);
  if (!s) throw ParseError(l.number, "unknown state '" + tok + "'");
  return *s;
}

struct Header {
  std::optional<std::size_t> k;
  std::vector<std::string> alphabet;
  std::vector<std::string> states;
  std::optional<std::string> initial;
  std::optional<std::vector<std::string>> accepting;
  std::vector<std::vector<std::string>> table;
  std::vector<Line> trans;
};

AnyAutomaton build(Header h, std::size_t last_line) {
  if (!h.k) throw ParseError(last_line, "missing kcounters line");
  if (h.states.empty()) throw ParseError(last_line, "missing states line");
  if (!h.initial) throw ParseError(last_line, "missing initial line");
  if (h.accepting && !h.table.empty()) throw ParseError(last_line, "file has both accepting and table lines");
  const std::size_t k = *h.k;
  // a throwaway machine gives name lookups for the transition lines
  CounterMachine names(k, h.alphabet, h.states, 0, {});
  Line init_line{last_line, {}};
  const StateId initial = parse_state(init_line, names, *h.initial);
  std::vector<Transition> ts;
  ts.reserve(h.trans.size());
  for (const auto& l : h.trans) {
    const std::size_t want = (k == 0 ? 4 : 5) + k;
    if (l.tokens.size() != want)
      throw ParseError(l.number, "trans needs " + std::to_string(want - 1) + " fields, got " + std::to_string(l.tokens.size() - 1));
    Transition t;
    t.source = parse_state(l, names, l.tokens[1]);
    t.input = names.letter_id(l.tokens[2]);
    if (t.input == kForeign) throw ParseError(l.number, "unknown letter '" + l.tokens[2] + "'");
    std::size_t pos = 3;
    if (k > 0) {
      const auto& g = l.tokens[pos++];
      if (g.size() != k) throw ParseError(l.number, "guard '" + g + "' must have " + std::to_string(k) + " bits");
      for (std::size_t i = 0; i < k; ++i) {
        if (g[i] == '1') t.positive |= 1U << i;
        else if (g[i] != '0') throw ParseError(l.number, "guard bits must be 0 or 1");
      }
    }
    t.destination = parse_state(l, names, l.tokens[pos++]);
    for (std::size_t i = 0; i < k; ++i) {
      int d = parse_number<int>(l, l.tokens[pos++], "delta");
      if (d == 1) t.increment |= 1U << i;
      else if (d == -1) t.decrement |= 1U << i;
      else if (d != 0) throw ParseError(l.number, "delta must be -1, 0 or +1");
      if (d == -1 && !(t.positive & (1U << i))) throw ParseError(l.number, "decrement on a counter tested for zero");
    }
    ts.push_back(t);
  }
  CounterMachine m(k, std::move(h.alphabet), std::move(h.states), initial, std::move(ts));
  if (!h.table.empty()) {
    std::vector<std::vector<StateId>> entries;
    for (const auto& e : h.table) {
      std::vector<StateId> ids;
      for (const auto& s : e) ids.push_back(parse_state(init_line, m, s));
      entries.push_back(std::move(ids));
    }
    return MullerAutomaton(std::move(m), std::move(entries));
  }
  std::vector<StateId> acc;
  if (h.accepting)
    for (const auto& s : *h.accepting) acc.push_back(parse_state(init_line, m, s));
  return BuchiAutomaton(std::move(m), std::move(acc));
}

void write_header(std::ostream& out, const CounterMachine& m) {
  out << "kcounters " << m.k() << "\nalphabet";
  for (const auto& a : m.alphabet()) out << ' ' << a;
  out << "\nstates";
  for (const auto& s : m.states()) out << ' ' << s;
  out << "\ninitial " << m.states()[m.initial()] << '\n';
}

void write_transitions(std::ostream& out, const CounterMachine& m) {
  std::string line;
  for (const auto& t : m.transitions()) {
    line = "trans ";
    line += m.states()[t.source];
    line += ' ';
    line += m.letter_name(t.input);
    if (m.k() > 0) {
      line += ' ';
      for (std::size_t i = 0; i < m.k(); ++i) line += ((t.positive >> i) & 1U) ? '1' : '0';
    }
    line += ' ';
    line += m.states()[t.destination];
    for (std::size_t i = 0; i < m.k(); ++i) {
      int d = t.delta(i);
      line += d > 0 ? " +1" : d < 0 ? " -1" : " 0";
    }
    line += '\n';
    out << line;
  }
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

AnyAutomaton read_automaton(std::istream& in) {
  Header h;
  std::size_t last = 0;
  for (auto& l : tokenize(in)) {
    last = l.number;
    const auto& key = l.tokens[0];
    std::vector<std::string> rest(l.tokens.begin() + 1, l.tokens.end());
    if (key == "kcounters") {
      if (rest.size() != 1) throw ParseError(l.number, "kcounters takes one value");
      h.k = parse_number<std::size_t>(l, rest[0], "counter count");
    } else if (key == "alphabet") {
      h.alphabet = std::move(rest);
    } else if (key == "states") {
      h.states = std::move(rest);
    } else if (key == "initial") {
      if (rest.size() != 1) throw ParseError(l.number, "initial takes one state");
      h.initial = rest[0];
    } else if (key == "accepting") {
      h.accepting = std::move(rest);
    } else if (key == "table") {
      h.table.push_back(std::move(rest));
    } else if (key == "trans") {
      h.trans.push_back(std::move(l));
    } else {
      throw ParseError(l.number, "unknown directive '" + key + "'");
    }
  }
  try {
    return build(std::move(h), last);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(last, e.what());
  }
}

BuchiAutomaton read_buchi(std::istream& in) {
  auto a = read_automaton(in);
  if (auto* b = std::get_if<BuchiAutomaton>(&a)) return std::move(*b);
  throw Error("expected a Büchi automaton, found a Muller table");
}

void write_automaton(std::ostream& out, const BuchiAutomaton& b) {
  write_header(out, b.machine);
  out << "accepting";
  for (StateId s : b.accepting) out << ' ' << b.machine.states()[s];
  out << '\n';
  write_transitions(out, b.machine);
}

void write_automaton(std::ostream& out, const MullerAutomaton& m) {
  write_header(out, m.machine);
  for (const auto& e : m.table) {
    out << "table";
    for (StateId s : e) out << ' ' << m.machine.states()[s];
    out << '\n';
  }
  write_transitions(out, m.machine);
}

Run read_run(std::istream& in, const CounterMachine& machine) {
  Run run;
  bool header = false, started = false;
  const std::size_t k = machine.k();
  auto counters = [&](const Line& l, std::size_t from) {
    if (l.tokens.size() != from + k)
      throw ParseError(l.number, "expected " + std::to_string(k) + " counter values");
    std::vector<Counter> c;
    for (std::size_t i = from; i < l.tokens.size(); ++i) c.push_back(parse_number<Counter>(l, l.tokens[i], "counter value"));
    return c;
  };
  for (auto& l : tokenize(in)) {
    const auto& key = l.tokens[0];
    if (key == "run") {
      header = true;
    } else if (key == "start") {
      if (!header || started) throw ParseError(l.number, "start must follow the run line once");
      if (l.tokens.size() < 2) throw ParseError(l.number, "start needs a state");
      run.start = {parse_state(l, machine, l.tokens[1]), counters(l, 2)};
      started = true;
    } else if (key == "step") {
      if (!started) throw ParseError(l.number, "step before start");
      if (l.tokens.size() < 4) throw ParseError(l.number, "step needs letter, index and state");
      RunStep s;
      s.consumed = machine.letter_id(l.tokens[1]);
      if (s.consumed == kForeign) throw ParseError(l.number, "unknown letter '" + l.tokens[1] + "'");
      s.transition = parse_number<std::size_t>(l, l.tokens[2], "transition index");
      s.result = {parse_state(l, machine, l.tokens[3]), counters(l, 4)};
      run.steps.push_back(std::move(s));
    } else {
      throw ParseError(l.number, "unknown directive '" + key + "'");
    }
  }
  if (!started) throw ParseError(0, "run file has no start line");
  return run;
}

void write_run(std::ostream& out, const Run& run, const CounterMachine& machine) {
  out << "run\nstart " << machine.states().at(run.start.state);
  for (Counter c : run.start.counters) out << ' ' << c;
  out << '\n';
  for (const auto& s : run.steps) {
    out << "step " << machine.letter_name(s.consumed) << ' ' << s.transition << ' ' << machine.states().at(s.result.state);
    for (Counter c : s.result.counters) out << ' ' << c;
    out << '\n';
  }
}

WordFile read_word(std::istream& in) {
  WordFile w;
  bool have_lasso = false;
  for (auto& l : tokenize(in)) {
    const auto& key = l.tokens[0];
    if (key == "coded") {
      if (have_lasso) throw ParseError(l.number, "coded lines must precede the lasso");
      if (l.tokens.size() != 2) throw ParseError(l.number, "coded takes one argument");
      const auto& arg = l.tokens[1];
      auto colon = arg.find(':');
      if (colon == std::string::npos) throw ParseError(l.number, "coded argument needs kind:value");
      std::string kind = arg.substr(0, colon), value = arg.substr(colon + 1);
      if (kind == "theta") {
        w.chain.push_back(ThetaCoding{parse_number<std::uint64_t>(l, value, "S")});
      } else if (kind == "phi") {
        w.chain.push_back(PhiCoding{parse_number<std::uint64_t>(l, value, "L")});
      } else if (kind == "h") {
        HCoding h;
        std::istringstream ss(value);
        for (std::string p; std::getline(ss, p, ',');) h.primes.push_back(parse_number<std::uint64_t>(l, p, "prime"));
        w.chain.push_back(h);
      } else {
        throw ParseError(l.number, "unknown coding '" + kind + "'");
      }
    } else if (key == "lasso") {
      if (have_lasso) throw ParseError(l.number, "more than one lasso line");
      std::string body;
      for (std::size_t i = 1; i < l.tokens.size(); ++i) body += l.tokens[i] + ' ';
      auto bar = body.find('|');
      if (bar != std::string::npos && body.find('|', bar + 1) != std::string::npos)
        throw ParseError(l.number, "lasso has two bars");
      auto split = [](const std::string& text) {
        Word out;
        std::istringstream ss(text);
        for (std::string tok; ss >> tok;) out.push_back(tok);
        return out;
      };
      if (bar == std::string::npos) throw ParseError(l.number, "lasso needs 'spoke | cycle'");
      try {
        w.lasso = LassoWord(split(body.substr(0, bar)), split(body.substr(bar + 1)));
      } catch (const Error& e) {
        throw ParseError(l.number, e.what());
      }
      have_lasso = true;
    } else if (key == "prefix") {
      if (l.tokens.size() != 2) throw ParseError(l.number, "prefix takes one value");
      w.prefix = parse_number<std::size_t>(l, l.tokens[1], "prefix length");
    } else {
      throw ParseError(l.number, "unknown directive '" + key + "'");
    }
  }
  if (!have_lasso) throw ParseError(0, "word file has no lasso line");
  return w;
}

void write_word(std::ostream& out, const WordFile& w) {
  for (const auto& c : w.chain) {
    out << "coded ";
    if (auto* t = std::get_if<ThetaCoding>(&c)) {
      out << "theta:" << t->S;
    } else if (auto* h = std::get_if<HCoding>(&c)) {
      out << "h:";
      for (std::size_t i = 0; i < h->primes.size(); ++i) out << (i ? "," : "") << h->primes[i];
    } else {
      out << "phi:" << std::get<PhiCoding>(c).L;
    }
    out << '\n';
  }
  out << "lasso";
  for (const auto& s : w.lasso.spoke) out << ' ' << s;
  out << " |";
  for (const auto& s : w.lasso.cycle) out << ' ' << s;
  out << '\n';
  if (w.prefix) out << "prefix " << *w.prefix << '\n';
}

Word materialize(const WordFile& w, std::size_t n) { return coded_prefix(w.chain, w.lasso, n); }

AnyAutomaton load_automaton(const std::string& path) {
  auto in = open_in(path);
  return read_automaton(in);
}

BuchiAutomaton load_buchi(const std::string& path) {
  auto in = open_in(path);
  return read_buchi(in);
}

void save_automaton(const std::string& path, const BuchiAutomaton& b) {
  auto out = open_out(path);
  write_automaton(out, b);
}

Run load_run(const std::string& path, const CounterMachine& machine) {
  auto in = open_in(path);
  return read_run(in, machine);
}

void save_run(const std::string& path, const Run& run, const CounterMachine& machine) {
  auto out = open_out(path);
  write_run(out, run, machine);
}

WordFile load_word(const std::string& path) {
  auto in = open_in(path);
  return read_word(in);
}

}  // namespace kcounter
