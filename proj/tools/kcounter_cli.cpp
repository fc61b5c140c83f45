// kcounter: build constructions, encode words, check runs and explore prefixes.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

#include "kcounter/constructions.hpp"
#include "kcounter/engine.hpp"
#include "kcounter/storage.hpp"
#include "kcounter/text_format.hpp"

using namespace kcounter;

namespace {

constexpr int kOk = 0, kFailure = 1, kUsage = 2;

// Writes to the file named by `path`, or stdout when it is empty.
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write(out);
}

void check_output(const BuchiAutomaton& b, bool real_time, std::optional<std::size_t> k) {
  if (real_time && !is_real_time(b.machine)) throw Error("output has lambda transitions");
  if (k && b.machine.k() != *k) throw Error("output has " + std::to_string(b.machine.k()) + " counters");
}

std::string join(const Word& w) {
  std::string out;
  for (const auto& l : w) {
    if (!out.empty()) out += ' ';
    out += l;
  }
  return out;
}

struct BuildArgs {
  std::string kind, input, out, pad = "", plus_file, minus_file;
  std::vector<std::string> sigma, plus, minus;
  std::vector<std::uint64_t> primes;
  std::uint64_t S = 0, L = 0;
  bool no_theta = false;
};

int cmd_build(const BuildArgs& a) {
  BuchiAutomaton out;
  auto primes = a.primes.empty() ? std::vector<std::uint64_t>{2, 3} : a.primes;
  if (a.kind == "theta-acceptor") {
    out = build_theta_acceptor(a.sigma, a.S, a.pad.empty() ? "E" : a.pad);
    check_output(out, true, 2);
  } else if (a.kind == "realtime8") {
    auto r8 = build_realtime8(load_buchi(a.input), a.pad.empty() ? "E" : a.pad);
    out = std::move(r8.automaton);
    check_output(out, true, 8);
    std::cerr << "S = " << r8.S << "\n";
  } else if (a.kind == "script-l") {
    auto in = load_buchi(a.input);
    if (a.primes.empty()) primes = first_primes(in.machine.k());
    out = build_script_L(in, primes).automaton();
    check_output(out, false, 1);
    auto burst = lambda_burst_bound(out.machine);
    HCoding h;
    h.primes = primes;
    if (!burst || *burst >= h.product()) throw Error("output lambda bursts exceed Q - 1");
  } else if (a.kind == "h-complement") {
    out = build_h_complement(a.sigma, primes).automaton;
    check_output(out, true, 1);
  } else if (a.kind == "phi-wrapper") {
    out = build_phi_wrapper(load_buchi(a.input), a.L, a.pad.empty() ? "F" : a.pad).automaton;
    check_output(out, true, std::nullopt);
  } else if (a.kind == "pipeline") {
    PipelineOptions opt;
    opt.theta_stage = !a.no_theta;
    opt.primes = a.primes;
    out = compose_pipeline(load_buchi(a.input), opt).automaton;
    check_output(out, true, 1);
  } else if (a.kind == "wadge-sum") {
    out = wadge_sum(load_buchi(a.input), load_buchi(a.plus_file), load_buchi(a.minus_file), a.plus, a.minus).automaton;
  } else {
    throw CLI::ValidationError("build", "unknown construction '" + a.kind + "'");
  }
  emit(a.out, [&](std::ostream& o) { write_automaton(o, out); });
  return kOk;
}

int cmd_word(const std::string& word_file, std::size_t n, const std::string& out) {
  auto w = load_word(word_file);
  emit(out, [&](std::ostream& o) { o << join(materialize(w, n)) << "\n"; });
  return kOk;
}

int cmd_check(const std::string& automaton, const std::string& word_file, const std::string& run_file,
              std::optional<std::size_t> prefix_len) {
  auto b = load_buchi(automaton);
  auto run = load_run(run_file, b.machine);
  auto w = load_word(word_file);
  const std::size_t n = prefix_len ? *prefix_len : consumed_letters(run).size();
  if (auto v = validate_run(b.machine, materialize(w, n), run)) {
    std::cout << "violation at step " << v->step << ": " << to_string(v->reason) << "\n";
    return kFailure;
  }
  std::cout << "ok steps " << run.steps.size() << " visits " << buchi_visit_count(run, b) << "\n";
  return kOk;
}

int cmd_explore(const std::string& automaton, const std::string& word_file, std::size_t n,
                std::optional<std::size_t> budget, std::size_t cap) {
  auto b = load_buchi(automaton);
  auto word = materialize(load_word(word_file), n);
  auto show = [](std::optional<std::uint32_t> v) { return v ? std::to_string(*v) : std::string("-"); };
  if (!budget && is_real_time(b.machine)) {
    ReachOptions opt;
    opt.cap = cap;
    auto r = exact_prefix_reach(b, word, opt);
    std::cout << "exact" << (r.inconclusive ? " inconclusive" : "") << "\n";
    for (std::size_t i = 0; i < r.sizes.size(); ++i)
      std::cout << i << " " << r.sizes[i] << " " << show(r.max_visits[i]) << "\n";
    return kOk;
  }
  auto e = bounded_explore(b, word, budget.value_or(0), cap);
  std::cout << "budget " << budget.value_or(0) << (e.exhausted ? " exhausted" : " capped") << "\n";
  for (std::size_t i = 0; i < e.sizes.size(); ++i)
    std::cout << i << " " << e.sizes[i] << " " << show(e.visits_per_position[i]) << "\n";
  return kOk;
}

int cmd_lasso(const std::string& automaton, const std::string& word_file) {
  auto b = load_buchi(automaton);
  auto w = load_word(word_file);
  if (!w.chain.empty()) throw Error("lasso-member expects an uncoded word");
  std::cout << (nba_lasso_member(b, w.lasso) ? "true" : "false") << "\n";
  return kOk;
}

int cmd_bench(unsigned k, std::size_t ops, std::uint64_t seed, std::size_t max_len) {
  if (k < 3) throw CLI::ValidationError("--k", "queue alphabets need k >= 3");
  std::mt19937_64 rng(seed);
  CountedQueue q(k);
  std::size_t violations = 0;
  std::cout << "op kind m cost bound\n";
  for (std::size_t i = 0; i < ops; ++i) {
    const std::size_t m = q.size();
    const bool add = m == 0 || (m < max_len && rng() % 2 == 0);
    const bool remove = !add && rng() % 2 == 0;
    QueueResult r = add ? queue_add_rear(q, 2 + static_cast<unsigned>(rng() % (k - 2)))
                        : remove ? queue_remove_front(q) : queue_front(q);
    const char* kind = add ? "add" : remove ? "remove" : "front";
    BigNat bound = add ? add_rear_bound(k, m) : front_bound(k, m);
    bool ok = r.cost <= bound;
    if (!ok) ++violations;
    std::cout << i << " " << kind << " " << m << " " << r.cost << " " << bound << (ok ? "" : " EXCEEDED") << "\n";
    q = std::move(r.queue);
  }
  std::cout << "violations " << violations << "\n";
  return violations == 0 ? kOk : kFailure;
}

struct LiftArgs {
  std::string stage, input, run, out, word_out;
  std::vector<std::uint64_t> primes;
  std::uint64_t L = 0;
  std::optional<std::size_t> prefix_len;
};

int cmd_lift(const LiftArgs& a) {
  auto src = load_buchi(a.input);
  auto run = load_run(a.run, src.machine);
  Word x;
  for (auto l : consumed_letters(run)) x.push_back(src.machine.letter_name(l));
  const std::size_t max_len = a.prefix_len.value_or(SIZE_MAX);
  auto primes = a.primes.empty() ? std::vector<std::uint64_t>{2, 3} : a.primes;
  RunCertificate c;
  BuchiAutomaton target;
  if (a.stage == "theta") {
    auto r8 = build_realtime8(src);
    c = lift_run_theta(r8, run, x, max_len);
    target = std::move(r8.automaton);
  } else if (a.stage == "script-l") {
    auto s = build_script_L(src, primes);
    c = lift_run_script_L(s, run, max_len);
    target = s.automaton();
  } else if (a.stage == "phi") {
    auto w = build_phi_wrapper(src, a.L);
    RunCertificate inner{"input", run, x, std::vector<std::size_t>(run.steps.size(), 0)};
    c = lift_run_phi(w, inner);
    target = w.automaton;
  } else if (a.stage == "pipeline") {
    PipelineOptions opt;
    opt.theta_stage = false;
    opt.primes = primes;
    auto p = compose_pipeline(src, opt);
    c = lift_pipeline(p, run);
    target = p.automaton;
  } else {
    throw CLI::ValidationError("--stage", "unknown stage '" + a.stage + "'");
  }
  if (auto v = check_certificate(target.machine, c)) {
    std::cout << "lifted run fails validation at step " << v->step << ": " << to_string(v->reason) << "\n";
    return kFailure;
  }
  emit(a.out, [&](std::ostream& o) { write_run(o, c.run, target.machine); });
  if (!a.word_out.empty()) emit(a.word_out, [&](std::ostream& o) { o << join(c.word) << "\n"; });
  const std::size_t blocks = c.block.empty() ? 0 : c.block.back();
  std::cerr << "stage " << c.stage << " steps " << c.run.steps.size() << " letters " << c.word.size() << " blocks "
            << blocks << " visits " << buchi_visit_count(c.run, target) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-counter automata constructions and checks"};
  app.require_subcommand(1);
  std::function<int()> action;

  BuildArgs build;
  auto* b = app.add_subcommand("build", "build a construction and write it as an automaton file");
  b->add_option("kind", build.kind, "theta-acceptor|realtime8|script-l|h-complement|phi-wrapper|pipeline|wadge-sum")
      ->required();
  b->add_option("--input", build.input, "input automaton file")->check(CLI::ExistingFile);
  b->add_option("--sigma", build.sigma, "base alphabet")->delimiter(',');
  b->add_option("--primes", build.primes, "prime list")->delimiter(',');
  b->add_option("--S", build.S, "theta block base");
  b->add_option("--L", build.L, "pad run length");
  b->add_option("--pad", build.pad, "pad letter");
  b->add_flag("--no-theta", build.no_theta, "pipeline without the 8-counter stage");
  b->add_option("--plus-automaton", build.plus_file, "wadge sum: automaton after a plus letter")->check(CLI::ExistingFile);
  b->add_option("--minus-automaton", build.minus_file, "wadge sum: automaton after a minus letter")->check(CLI::ExistingFile);
  b->add_option("--plus", build.plus, "wadge sum: plus letters")->delimiter(',');
  b->add_option("--minus", build.minus, "wadge sum: minus letters")->delimiter(',');
  b->add_option("-o", build.out, "output file (default stdout)");
  b->callback([&] { action = [&] { return cmd_build(build); }; });

  std::string word_file, automaton_file, run_file, out_file;
  std::size_t prefix = 0;
  auto* word = app.add_subcommand("word", "coded words");
  auto* encode = word->add_subcommand("encode", "print a prefix of a word file");
  word->require_subcommand(1);
  encode->add_option("--word", word_file)->required()->check(CLI::ExistingFile);
  encode->add_option("--prefix-len", prefix)->required();
  encode->add_option("-o", out_file);
  encode->callback([&] { action = [&] { return cmd_word(word_file, prefix, out_file); }; });

  std::optional<std::size_t> check_len;
  auto* runc = app.add_subcommand("run", "runs");
  runc->require_subcommand(1);
  auto* check = runc->add_subcommand("check", "validate a run on a word prefix");
  check->add_option("--automaton", automaton_file)->required()->check(CLI::ExistingFile);
  check->add_option("--word", word_file)->required()->check(CLI::ExistingFile);
  check->add_option("--run", run_file)->required()->check(CLI::ExistingFile);
  check->add_option("--prefix-len", check_len, "defaults to the letters the run consumes");
  check->callback([&] { action = [&] { return cmd_check(automaton_file, word_file, run_file, check_len); }; });

  std::optional<std::size_t> budget;
  std::size_t cap = 10'000'000;
  auto* explore = app.add_subcommand("explore", "per-position frontier sizes and accepting visits");
  explore->add_option("--automaton", automaton_file)->required()->check(CLI::ExistingFile);
  explore->add_option("--word", word_file)->required()->check(CLI::ExistingFile);
  explore->add_option("--prefix-len", prefix)->required();
  explore->add_option("--lambda-budget", budget);
  explore->add_option("--cap", cap);
  explore->callback([&] { action = [&] { return cmd_explore(automaton_file, word_file, prefix, budget, cap); }; });

  auto* lasso = app.add_subcommand("lasso-member", "exact membership of a lasso word (automata without counters)");
  lasso->add_option("--automaton", automaton_file)->required()->check(CLI::ExistingFile);
  lasso->add_option("--word", word_file)->required()->check(CLI::ExistingFile);
  lasso->callback([&] { action = [&] { return cmd_lasso(automaton_file, word_file); }; });

  unsigned k = 4;
  std::size_t ops = 100, max_len = 6;
  std::uint64_t seed = 0;
  auto* bench = app.add_subcommand("bench", "step-count benchmarks");
  bench->require_subcommand(1);
  auto* qb = bench->add_subcommand("queue-bounds", "random queue history against the step bounds");
  qb->add_option("--k", k);
  qb->add_option("--ops", ops);
  qb->add_option("--seed", seed)->required();
  qb->add_option("--max-len", max_len, "longest queue content");
  qb->callback([&] { action = [&] { return cmd_bench(k, ops, seed, max_len); }; });

  LiftArgs lift;
  auto* lc = app.add_subcommand("lift", "lift a run of the input automaton into a construction");
  lc->add_option("--stage", lift.stage, "theta|script-l|phi|pipeline")->required();
  lc->add_option("--input", lift.input, "input automaton file")->required()->check(CLI::ExistingFile);
  lc->add_option("--run", lift.run, "run file of the input automaton")->required()->check(CLI::ExistingFile);
  lc->add_option("--primes", lift.primes)->delimiter(',');
  lc->add_option("--L", lift.L);
  lc->add_option("--prefix-len", lift.prefix_len, "cap on the lifted prefix");
  lc->add_option("-o", lift.out, "lifted run file (default stdout)");
  lc->add_option("--word-out", lift.word_out, "file for the lifted word prefix");
  lc->callback([&] { action = [&] { return cmd_lift(lift); }; });

  try {
    app.parse(argc, argv);
    return action();
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
