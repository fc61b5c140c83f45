// Builders for the coded-language automata and the maps that carry runs between them.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kcounter/closure.hpp"
#include "kcounter/machine.hpp"
#include "kcounter/omega_words.hpp"

namespace kcounter {

/// Error raised inside one stage of a multi-stage build.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// ---- certificates ------------------------------------------------------------

/// A run together with the word prefix it reads and the coded block each step serves.
struct RunCertificate {
  std::string stage;
  Run run;
  Word word;
  std::vector<std::size_t> block;  // per step; 0 means before the first block
};

std::optional<RunViolation> check_certificate(const CounterMachine& m, const RunCertificate& c);
/// Accepting visits grouped by block annotation; entry 0 includes the start configuration.
std::vector<std::size_t> visits_per_block(const BuchiAutomaton& b, const RunCertificate& c);

/// Picks one of the enabled transitions (lambda or on the next letter), or nullopt to
/// end the run at the current position.
using Chooser = std::function<std::optional<std::uint32_t>(const Configuration& at, std::size_t position,
                                                           std::span<const std::uint32_t> enabled)>;

/// Runs `m` on `word` from the initial configuration. Without a chooser exactly one
/// transition must be enabled at every step and the run ends once the word is consumed
/// and nothing is enabled. Throws when no transition is enabled before the word ends.
Run drive_run(const CounterMachine& m, std::span<const std::string> word, const Chooser& choose = {},
              std::size_t max_steps = 100'000'000);

// ---- theta_S shape acceptor and the real-time 8-counter simulation ----------

BuchiAutomaton build_theta_acceptor(const std::vector<std::string>& sigma, std::uint64_t S, const std::string& pad = "E");

/// Deterministic run of the shape acceptor over the first `blocks` letters of x and their pads.
RunCertificate theta_certificate(const BuchiAutomaton& acceptor, const LassoWord& x, std::uint64_t S, std::size_t blocks);

/// Pad exponent base used by build_realtime8 for an alphabet of the given size: (3(n+2))^3.
std::uint64_t realtime8_constant(std::size_t sigma_size);

struct Realtime8 {
  std::uint64_t S = 0;
  std::size_t queue_base = 0;  // |Sigma| + 2
  std::string pad = "E";
  BuchiAutomaton source;       // the 2-counter input
  BuchiAutomaton automaton;    // k = 8: shape counters, two stacks, simulated counters
  std::vector<std::int32_t> source_transition;  // per transition: simulated input transition or -1
  std::vector<std::uint8_t> idle;               // per state: simulation waits for the next Sigma letter
};

struct Realtime8Options {
  std::size_t state_limit = 6'000'000;
};

Realtime8 build_realtime8(const BuchiAutomaton& a, const std::string& pad = "E", const Realtime8Options& opt = {});

/// Lifts a run of the input automaton on x to the 8-counter automaton on a theta_S prefix.
/// Block i hosts the i-th source step; the certificate stops once the last step is simulated.
RunCertificate lift_run_theta(const Realtime8& r8, const Run& a_run, std::span<const std::string> x,
                              std::size_t max_len = SIZE_MAX);

// ---- the one-counter block protocol ------------------------------------------

enum class ScriptStep : std::uint8_t { Open, U, V, Letter, Close, W, Z, Lambda };

struct ScriptL {
  HCoding coding;
  std::uint64_t Q = 1;
  BuchiAutomaton source;
  BuchiAutomaton raw;                           // block protocol before the shape guard
  std::vector<std::int32_t> raw_source;         // per raw transition: simulated transition or -1
  std::vector<ScriptStep> raw_step;             // per raw transition
  BuchiAutomaton guard;                         // deterministic (A 0* Sigma B 0*)^omega
  DetProduct guarded;                           // raw x guard; the builder's output

  const BuchiAutomaton& automaton() const { return guarded.automaton; }
};

ScriptL build_script_L(const BuchiAutomaton& a, const std::vector<std::uint64_t>& primes,
                       std::uint64_t state_limit = 20'000'000);
/// Deterministic Büchi automaton for (open 0* Sigma close 0*)^omega, completed by a sink.
BuchiAutomaton build_shape_guard(const std::vector<std::string>& sigma, const HCoding& coding);

/// Lift of an n-step run: blocks 1..n complete plus the zeros preceding letter n+1.
RunCertificate lift_run_script_L(const ScriptL& s, const Run& a_run, std::size_t max_len = SIZE_MAX);
Run project_run_script_L(const ScriptL& s, const RunCertificate& c);
/// u/v/x/w/z lengths read off the certificate's own steps, one record per completed block.
std::vector<BlockRecord> script_L_blocks(const ScriptL& s, const RunCertificate& c);

// ---- complement of the h image -------------------------------------------------

struct HComplement {
  HCoding coding;
  std::array<BuchiAutomaton, 4> parts;  // D1..D4, each over Sigma + markers, k = 1
  BuchiAutomaton regular;               // D1 union D2 without counters
  BuchiAutomaton automaton;             // union of the four parts
  std::array<std::vector<StateId>, 4> sinks;  // witness sinks in `automaton` (D2: its accepting states)
};

HComplement build_h_complement(const std::vector<std::string>& sigma, const std::vector<std::uint64_t>& primes);

// ---- padding wrapper -----------------------------------------------------------

struct PhiWrapper {
  std::uint64_t L = 0;
  std::string pad = "F";
  BuchiAutomaton automaton;
  std::vector<std::int64_t> source_transition;  // per transition: wrapped transition or -1 (idle pad)
};

PhiWrapper build_phi_wrapper(const BuchiAutomaton& b, std::uint64_t L, const std::string& pad = "F");
/// Places each lambda burst on the first pads preceding the next letter.
RunCertificate lift_run_phi(const PhiWrapper& w, const RunCertificate& inner);

// ---- pipeline and Wadge sum ---------------------------------------------------

struct PipelineOptions {
  bool theta_stage = true;
  std::vector<std::uint64_t> primes;  // empty: first 8 primes
  std::string pad_theta = "E";
  std::string pad_phi = "F";
  /// Stages whose estimated state count exceeds this fail before building.
  std::uint64_t state_limit = 20'000'000;
};

struct PipelineOutput {
  BuchiAutomaton automaton;
  std::vector<CodingSpec> chain;  // outermost first
  std::optional<Realtime8> realtime8;
  ScriptL script;
  HComplement complement;
  BuchiAutomaton joined;  // script output union complement
  PhiWrapper phi;
};

PipelineOutput compose_pipeline(const BuchiAutomaton& a, const PipelineOptions& opt = {});
/// Composes the script, union and padding lifts (pipelines built without the theta stage).
RunCertificate lift_pipeline(const PipelineOutput& p, const Run& a_run);

struct WadgeSum {
  BuchiAutomaton automaton;
  BuchiAutomaton stay;       // bL over Y, padded
  BuchiAutomaton switching;  // reads X*, one plus or minus letter, then the chosen branch
  std::size_t plus_transitions = 0;   // index of the first copied bLp transition in `switching`
  std::size_t minus_transitions = 0;  // same for bLpComp
  StateId plus_states = 0;            // index of bLp's first state in `switching`
  StateId minus_states = 0;
};

WadgeSum wadge_sum(const BuchiAutomaton& bL, const BuchiAutomaton& bLp, const BuchiAutomaton& bLpComp,
                   const std::vector<std::string>& plus, const std::vector<std::string>& minus);
/// Run of the sum that stays with bL.
Run lift_wadge_stay(const WadgeSum& w, const Run& run);
/// Run of the sum that reads `prefix` over X, then `letter`, then follows `run` of the chosen branch.
Run lift_wadge_switch(const WadgeSum& w, bool plus, const Word& prefix, const std::string& letter, const Run& run);

}  // namespace kcounter
