#ifndef STAGESIM_MACHINE_HPP
#define STAGESIM_MACHINE_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stagesim/bitstring.hpp"

namespace stagesim {

/// Which construction rule produced a table entry.
enum class Rule { Padding, Copy, Zeros, ConeEmpty };

std::string rule_name(Rule r);
std::optional<Rule> rule_from_name(const std::string& name);

/// One grafting step: the entry originates from `source_id` and was placed
/// below `prefix`. Chains are ordered outermost-first, so concatenating the
/// prefixes yields the entry's region base.
struct SpliceStep {
  std::string source_id;
  BitString prefix;
  bool operator==(const SpliceStep&) const = default;
};

struct Provenance {
  Rule rule = Rule::Copy;
  std::vector<SpliceStep> chain;  // outermost-first

  std::string to_string() const;
  static Provenance parse(const std::string& text);
  BitString region() const;
  bool operator==(const Provenance&) const = default;
};

struct MachineEntry {
  BitString output;
  int stage = 0;
  Provenance provenance;
};

/// A stagewise-defined monotone map from input strings to output strings.
/// Entries are explicit table rows; in addition a set of empty cones maps
/// every string compatible with a cone base to the empty string. Explicit
/// entries inside empty cones are rejected, so "defined by table row" and
/// "pinned to empty by a cone" stay distinguishable: the definition
/// frontier (and hence every stage measure) counts table rows only.
///
/// Invariants enforced on definition: a value, once defined, never changes,
/// and whenever sigma <= tau are both defined, value(sigma) <= value(tau)
/// in the prefix order.
class MonotoneMachine {
 public:
  explicit MonotoneMachine(std::string id) : id_(std::move(id)) {}

  /// The machine mapping every string to the empty string.
  static MonotoneMachine everywhere_empty(std::string id);

  const std::string& id() const { return id_; }
  void set_id(std::string id) { id_ = std::move(id); }
  int horizon() const { return horizon_; }
  void extend_horizon(int stage);

  const std::map<BitString, MachineEntry>& table() const { return table_; }
  const std::vector<BitString>& empty_cones() const { return empty_cones_; }

  /// Adds a table row. Throws MonotonicityBreakError on redefinition, on a
  /// prefix-order violation against defined prefixes/extensions, or when
  /// the input lies in an empty cone.
  void define(const BitString& input, const BitString& output, int stage,
              Provenance provenance);
  /// Declares that every string compatible with `base` maps to the empty
  /// string. Throws MonotonicityBreakError when a table row conflicts.
  void add_empty_cone(const BitString& base);

  bool in_empty_cone(const BitString& input) const;
  const MachineEntry* entry(const BitString& input) const;
  /// Value at the final stage; empty-cone strings give the empty string.
  std::optional<BitString> value(const BitString& input) const;
  /// Value visible at `stage`.
  std::optional<BitString> value_at(const BitString& input, int stage) const;

  /// Distinct entry regions (grafting prefixes; the root region is the
  /// empty string when any ungrafted entry exists).
  std::vector<BitString> region_bases() const;
  /// Length of the longest input defined by `stage` within a region, or
  /// -1 when the region has no entries yet.
  int frontier_length(const BitString& region, int stage) const;

  /// Exhaustive monotonicity audit across all defined pairs; returns
  /// human-readable violations (empty = consistent).
  std::vector<std::string> check_monotonicity() const;

  /// CSV table (stage,input,output,rule), cones first, then entries
  /// ordered by (stage, input).
  void write_csv(std::ostream& out) const;
  /// Rebuilds a machine from its CSV form; rejects tables violating
  /// monotonicity (via define/add_empty_cone).
  static MonotoneMachine load_csv(std::istream& in, std::string id);

  /// Fault-injection hooks for the verifier: unchecked mutations.
  bool erase_entry(const BitString& input);
  bool force_rule(const BitString& input, Rule rule);
  bool force_output(const BitString& input, const BitString& output);

 private:
  std::string id_;
  std::map<BitString, MachineEntry> table_;
  std::vector<BitString> empty_cones_;
  int horizon_ = 0;
};

}  // namespace stagesim

#endif  // STAGESIM_MACHINE_HPP
