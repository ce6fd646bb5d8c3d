#include "stagesim/measure.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "stagesim/errors.hpp"

namespace stagesim {

PhiTable::PhiTable(std::string pattern) : pattern_(std::move(pattern)) {
  for (char c : pattern_) {
    if (c != '0' && c != '1' && c != 'x') {
      throw InvalidArgumentError("phi pattern may contain only 0/1/x");
    }
  }
}

bool PhiTable::defined(std::size_t i) const {
  return i < pattern_.size() && pattern_[i] != 'x';
}

bool PhiTable::bit(std::size_t i) const { return pattern_[i] == '1'; }

bool PhiTable::fully_defined_below(std::size_t n) const {
  for (std::size_t i = 0; i < n; ++i) {
    if (!defined(i)) return false;
  }
  return true;
}

PhiTable PhiTable::constant(bool bit, std::size_t length) {
  return PhiTable(std::string(length, bit ? '1' : '0'));
}

ClassSpec ClassSpec::total() { return {}; }

ClassSpec ClassSpec::ends_in_zeros() {
  ClassSpec c;
  c.kind = Kind::EndsInZeros;
  return c;
}

ClassSpec ClassSpec::matches_phi(int e, PhiTable phi) {
  ClassSpec c;
  c.kind = Kind::MatchesPhi;
  c.phi_index = e;
  c.phi = std::move(phi);
  return c;
}

ClassSpec ClassSpec::in_ml_test(int e, int s, PhiTable phi) {
  ClassSpec c;
  c.kind = Kind::InMLTest;
  c.phi_index = e;
  c.test_stage = s;
  c.phi = std::move(phi);
  return c;
}

std::string ClassSpec::name() const {
  switch (kind) {
    case Kind::Total:
      return "TOTAL";
    case Kind::EndsInZeros:
      return "ENDS_IN_ZEROS";
    case Kind::MatchesPhi:
      return "MATCHES_PHI(" + std::to_string(phi_index) + ")";
    case Kind::InMLTest:
      return "IN_ML_TEST(" + std::to_string(phi_index) + "," +
             std::to_string(test_stage) + ")";
  }
  return "?";
}

namespace {

bool entry_satisfies(const MachineEntry& e, const ClassSpec& c) {
  switch (c.kind) {
    case ClassSpec::Kind::Total:
      return true;
    case ClassSpec::Kind::EndsInZeros:
      return e.provenance.rule == Rule::Padding ||
             e.provenance.rule == Rule::Zeros;
    case ClassSpec::Kind::MatchesPhi: {
      const BitString& out = e.output;
      if (!c.phi.fully_defined_below(out.length())) return false;
      for (std::size_t i = 0; i < out.length(); ++i) {
        if (out.bit(i) != c.phi.bit(i)) return false;
      }
      return true;
    }
    case ClassSpec::Kind::InMLTest:
      return false;  // handled separately
  }
  return false;
}

// Sum of 2^{-frontier} over the frontier strings of each region whose
// entry exists at the stage and satisfies `accept`; when `count_missing`
// is set, counts the frontier strings without a current entry instead.
Dyadic frontier_measure(const MonotoneMachine& m, int stage,
                        const ClassSpec* accept, bool count_missing) {
  // Region -> frontier length at this stage.
  std::map<BitString, int> frontiers;
  for (const auto& [input, e] : m.table()) {
    if (e.stage > stage) continue;
    BitString region = e.provenance.region();
    auto [it, inserted] = frontiers.emplace(region, input.length());
    if (!inserted) {
      it->second = std::max(it->second, static_cast<int>(input.length()));
    }
  }
  // Exclusion set: every region base and empty cone.
  std::vector<BitString> bases;
  for (const auto& [r, f] : frontiers) bases.push_back(r);
  for (const BitString& c : m.empty_cones()) bases.push_back(c);

  Dyadic total;
  for (const auto& [region, frontier] : frontiers) {
    const std::size_t suffix_len =
        static_cast<std::size_t>(frontier) - region.length();
    Dyadic cell = Dyadic::pow2_neg(static_cast<unsigned long>(frontier));
    for (const BitString& suffix : all_strings_of_length(suffix_len)) {
      BitString input = region.concat(suffix);
      bool excluded = false;
      for (const BitString& b : bases) {
        if (region < b && region.is_prefix_of(b) && b.compatible_with(input)) {
          excluded = true;
          break;
        }
      }
      if (excluded) continue;
      const MachineEntry* e = m.entry(input);
      bool defined = e != nullptr && e->stage <= stage &&
                     e->provenance.region() == region;
      if (count_missing) {
        if (!defined) total += cell;
      } else if (defined && entry_satisfies(*e, *accept)) {
        total += cell;
      }
    }
  }
  return total;
}

}  // namespace

Dyadic stage_measure(const MonotoneMachine& m, const ClassSpec& c, int stage) {
  if (stage < 0 || stage > m.horizon()) {
    throw HorizonExceededError("stage " + std::to_string(stage) +
                               " past machine horizon " +
                               std::to_string(m.horizon()));
  }
  if (c.kind == ClassSpec::Kind::InMLTest) {
    return ml_test_weight(c.phi_index, c.test_stage, c.phi);
  }
  return frontier_measure(m, stage, &c, /*count_missing=*/false);
}

Dyadic stage_undefined_measure(const MonotoneMachine& m, int stage) {
  if (stage < 0 || stage > m.horizon()) {
    throw HorizonExceededError("stage " + std::to_string(stage) +
                               " past machine horizon " +
                               std::to_string(m.horizon()));
  }
  // Independent route: enumerate at one global depth and resolve each
  // stream's region by its innermost covering base, instead of the
  // per-region sweep used by stage_measure. The two must tile the space.
  std::map<BitString, int> frontiers;
  for (const auto& [input, e] : m.table()) {
    if (e.stage > stage) continue;
    BitString region = e.provenance.region();
    auto [it, inserted] = frontiers.emplace(region, input.length());
    if (!inserted) {
      it->second = std::max(it->second, static_cast<int>(input.length()));
    }
  }
  std::size_t depth = 1;
  for (const auto& [r, f] : frontiers) {
    depth = std::max(depth, static_cast<std::size_t>(f));
  }
  for (const BitString& c : m.empty_cones()) {
    depth = std::max(depth, c.length() + 1);
  }
  for (const auto& [r, f] : frontiers) {
    depth = std::max(depth, r.length() + 1);
  }
  if (depth > 22) {
    throw InvalidArgumentError("undefined-measure enumeration too deep");
  }
  Dyadic dead;
  Dyadic cell = Dyadic::pow2_neg(depth);
  for (const BitString& x : all_strings_of_length(depth)) {
    // Innermost base (entry region or cone) that is a prefix of x.
    const BitString* best_region = nullptr;
    bool best_is_cone = false;
    std::size_t best_len = 0;
    bool found = false;
    for (const auto& [r, f] : frontiers) {
      if (r.is_prefix_of(x) && (!found || r.length() >= best_len)) {
        best_region = &r;
        best_len = r.length();
        best_is_cone = false;
        found = true;
      }
    }
    for (const BitString& c : m.empty_cones()) {
      if (c.is_prefix_of(x) && (!found || c.length() >= best_len)) {
        best_region = &c;
        best_len = c.length();
        best_is_cone = true;
        found = true;
      }
    }
    bool alive = false;
    if (found && !best_is_cone) {
      int f = frontiers.at(*best_region);
      const MachineEntry* e = m.entry(x.prefix(static_cast<std::size_t>(f)));
      alive = e != nullptr && e->stage <= stage &&
              e->provenance.region() == *best_region;
    }
    if (!alive) dead += cell;
  }
  return dead;
}

PrefixFreeSet ml_test_member(int e, int s, const PhiTable& phi) {
  (void)e;
  if (s < 0) throw InvalidArgumentError("ml test stage must be >= 0");
  PrefixFreeSet out;
  const std::size_t len = (std::size_t{1} << (s + 1)) - 1;
  if (!phi.fully_defined_below(std::size_t{1} << (s + 1))) return out;
  const std::size_t block_start = (std::size_t{1} << s) - 1;
  const std::size_t free_count = block_start;
  if (free_count > 20) {
    throw InvalidArgumentError(
        "ml test member not materializable at stage " + std::to_string(s));
  }
  std::string bits(len, '0');
  for (std::size_t i = block_start; i < len; ++i) {
    bits[i] = phi.bit(i) ? '1' : '0';
  }
  for (std::size_t v = 0; v < (std::size_t{1} << free_count); ++v) {
    for (std::size_t i = 0; i < free_count; ++i) {
      bits[i] = ((v >> (free_count - 1 - i)) & 1) ? '1' : '0';
    }
    out.insert(BitString(bits));
  }
  return out;
}

Dyadic ml_test_weight(int e, int s, const PhiTable& phi) {
  (void)e;
  if (s < 0) throw InvalidArgumentError("ml test stage must be >= 0");
  if (!phi.fully_defined_below(std::size_t{1} << (s + 1))) return Dyadic();
  return Dyadic::pow2_neg(std::size_t{1} << s);
}

void StageMeasureTrace::write_csv(std::ostream& out) const {
  out << "stage,machine_id,class,measure,target,residual\n";
  for (std::size_t s = 0; s < measures.size(); ++s) {
    out << s << ',' << machine_id << ',' << class_name << ','
        << measures[s].to_string() << ',';
    if (s < targets.size() && targets[s]) {
      out << targets[s]->to_string() << ','
          << (measures[s] - *targets[s]).to_string();
    } else {
      out << ',';
    }
    out << '\n';
  }
}

StageMeasureTrace compute_trace(const MonotoneMachine& m, const ClassSpec& c,
                                int horizon) {
  StageMeasureTrace t;
  t.machine_id = m.id();
  t.class_name = c.name();
  for (int s = 0; s <= horizon; ++s) {
    t.measures.push_back(stage_measure(m, c, s));
  }
  return t;
}

SpliceReport verify_splice_identity(const MonotoneMachine& spliced,
                                    const MonotoneMachine& inner,
                                    const MonotoneMachine& outer, int e,
                                    const ClassSpec& c) {
  SpliceReport report;
  report.class_name = c.name();
  int horizon = std::min({spliced.horizon(), inner.horizon(), outer.horizon()});
  for (int s = 0; s <= horizon; ++s) {
    Dyadic lhs = stage_measure(spliced, c, s);
    Dyadic rhs = stage_measure(outer, c, s) +
                 stage_measure(inner, c, s).scaled_down(
                     static_cast<unsigned long>(e));
    if (lhs != rhs) {
      report.violations.push_back({s, lhs, rhs});
    }
  }
  return report;
}

}  // namespace stagesim
