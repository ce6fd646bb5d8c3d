#include "stagesim/machine.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "stagesim/errors.hpp"

namespace stagesim {

std::string rule_name(Rule r) {
  switch (r) {
    case Rule::Padding:
      return "padding";
    case Rule::Copy:
      return "copy";
    case Rule::Zeros:
      return "zeros";
    case Rule::ConeEmpty:
      return "cone-empty";
  }
  return "?";
}

std::optional<Rule> rule_from_name(const std::string& name) {
  if (name == "padding") return Rule::Padding;
  if (name == "copy") return Rule::Copy;
  if (name == "zeros") return Rule::Zeros;
  if (name == "cone-empty") return Rule::ConeEmpty;
  return std::nullopt;
}

std::string Provenance::to_string() const {
  std::string out;
  for (const SpliceStep& step : chain) {
    out += "spliced(" + step.source_id + "," + step.prefix.str() + ")|";
  }
  out += rule_name(rule);
  return out;
}

Provenance Provenance::parse(const std::string& text) {
  Provenance p;
  std::size_t pos = 0;
  while (text.compare(pos, 8, "spliced(") == 0) {
    std::size_t comma = text.find(',', pos + 8);
    std::size_t close = text.find(')', pos + 8);
    if (comma == std::string::npos || close == std::string::npos ||
        comma > close || text.size() <= close + 1 || text[close + 1] != '|') {
      throw InvalidArgumentError("malformed provenance: " + text);
    }
    SpliceStep step;
    step.source_id = text.substr(pos + 8, comma - pos - 8);
    step.prefix = BitString(text.substr(comma + 1, close - comma - 1));
    p.chain.push_back(std::move(step));
    pos = close + 2;
  }
  auto r = rule_from_name(text.substr(pos));
  if (!r) throw InvalidArgumentError("unknown rule in provenance: " + text);
  p.rule = *r;
  return p;
}

BitString Provenance::region() const {
  BitString base;
  for (const SpliceStep& step : chain) base = base.concat(step.prefix);
  return base;
}

MonotoneMachine MonotoneMachine::everywhere_empty(std::string id) {
  MonotoneMachine m(std::move(id));
  m.add_empty_cone(BitString());
  return m;
}

void MonotoneMachine::extend_horizon(int stage) {
  horizon_ = std::max(horizon_, stage);
}

bool MonotoneMachine::in_empty_cone(const BitString& input) const {
  for (const BitString& base : empty_cones_) {
    if (base.compatible_with(input)) return true;
  }
  return false;
}

const MachineEntry* MonotoneMachine::entry(const BitString& input) const {
  auto it = table_.find(input);
  return it == table_.end() ? nullptr : &it->second;
}

std::optional<BitString> MonotoneMachine::value(const BitString& input) const {
  if (in_empty_cone(input)) return BitString();
  if (const MachineEntry* e = entry(input)) return e->output;
  return std::nullopt;
}

std::optional<BitString> MonotoneMachine::value_at(const BitString& input,
                                                   int stage) const {
  if (in_empty_cone(input)) return BitString();
  if (const MachineEntry* e = entry(input)) {
    if (e->stage <= stage) return e->output;
  }
  return std::nullopt;
}

void MonotoneMachine::define(const BitString& input, const BitString& output,
                             int stage, Provenance provenance) {
  if (table_.count(input)) {
    throw MonotonicityBreakError("machine " + id_ + ": input " + input.str() +
                                 " already defined");
  }
  if (in_empty_cone(input)) {
    throw MonotonicityBreakError("machine " + id_ + ": input " + input.str() +
                                 " lies in an empty cone");
  }
  // Against defined prefixes.
  for (std::size_t i = 0; i < input.length(); ++i) {
    auto it = table_.find(input.prefix(i));
    if (it != table_.end() && !it->second.output.is_prefix_of(output)) {
      throw MonotonicityBreakError(
          "machine " + id_ + ": value at " + it->first.str() +
          " is not a prefix of the value at " + input.str());
    }
  }
  // Against defined extensions (contiguous range in lexicographic order).
  for (auto it = table_.lower_bound(input);
       it != table_.end() && input.is_prefix_of(it->first); ++it) {
    if (!output.is_prefix_of(it->second.output)) {
      throw MonotonicityBreakError(
          "machine " + id_ + ": value at " + input.str() +
          " is not a prefix of the value at " + it->first.str());
    }
  }
  extend_horizon(stage);
  table_.emplace(input,
                 MachineEntry{output, stage, std::move(provenance)});
}

void MonotoneMachine::add_empty_cone(const BitString& base) {
  for (const auto& [input, e] : table_) {
    if (base.compatible_with(input)) {
      throw MonotonicityBreakError("machine " + id_ + ": empty cone " +
                                   base.str() + " overlaps defined input " +
                                   input.str());
    }
  }
  if (std::find(empty_cones_.begin(), empty_cones_.end(), base) ==
      empty_cones_.end()) {
    empty_cones_.push_back(base);
    std::sort(empty_cones_.begin(), empty_cones_.end());
  }
}

std::vector<BitString> MonotoneMachine::region_bases() const {
  std::set<BitString> bases;
  for (const auto& [input, e] : table_) {
    bases.insert(e.provenance.region());
  }
  return {bases.begin(), bases.end()};
}

int MonotoneMachine::frontier_length(const BitString& region,
                                     int stage) const {
  int best = -1;
  for (const auto& [input, e] : table_) {
    if (e.stage <= stage && e.provenance.region() == region) {
      best = std::max(best, static_cast<int>(input.length()));
    }
  }
  return best;
}

std::vector<std::string> MonotoneMachine::check_monotonicity() const {
  std::vector<std::string> violations;
  for (const auto& [input, e] : table_) {
    if (in_empty_cone(input)) {
      violations.push_back("entry " + input.str() + " inside an empty cone");
    }
    for (std::size_t i = 0; i < input.length(); ++i) {
      auto it = table_.find(input.prefix(i));
      if (it != table_.end() && !it->second.output.is_prefix_of(e.output)) {
        violations.push_back("value(" + it->first.str() +
                             ") is not a prefix of value(" + input.str() + ")");
      }
    }
  }
  return violations;
}

void MonotoneMachine::write_csv(std::ostream& out) const {
  out << "stage,input,output,rule\n";
  for (const BitString& base : empty_cones_) {
    out << "0," << base.str() << ",,cone-empty\n";
  }
  std::vector<const std::pair<const BitString, MachineEntry>*> rows;
  rows.reserve(table_.size());
  for (const auto& kv : table_) rows.push_back(&kv);
  std::stable_sort(rows.begin(), rows.end(), [](auto* a, auto* b) {
    if (a->second.stage != b->second.stage) {
      return a->second.stage < b->second.stage;
    }
    return a->first < b->first;
  });
  for (auto* row : rows) {
    out << row->second.stage << ',' << row->first.str() << ','
        << row->second.output.str() << ','
        << row->second.provenance.to_string() << '\n';
  }
}

MonotoneMachine MonotoneMachine::load_csv(std::istream& in, std::string id) {
  MonotoneMachine m(std::move(id));
  std::string line;
  if (!std::getline(in, line) || line != "stage,input,output,rule") {
    throw InvalidArgumentError("machine CSV must start with its header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        throw InvalidArgumentError("machine CSV row with missing fields: " +
                                   line);
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    fields.push_back(line.substr(start));
    int stage = 0;
    try {
      stage = std::stoi(fields[0]);
    } catch (...) {
      throw InvalidArgumentError("bad stage in machine CSV: " + fields[0]);
    }
    if (fields[3] == "cone-empty") {
      m.add_empty_cone(BitString(fields[1]));
      continue;
    }
    m.define(BitString(fields[1]), BitString(fields[2]), stage,
             Provenance::parse(fields[3]));
  }
  return m;
}

bool MonotoneMachine::erase_entry(const BitString& input) {
  return table_.erase(input) > 0;
}

bool MonotoneMachine::force_rule(const BitString& input, Rule rule) {
  auto it = table_.find(input);
  if (it == table_.end()) return false;
  it->second.provenance.rule = rule;
  return true;
}

bool MonotoneMachine::force_output(const BitString& input,
                                   const BitString& output) {
  auto it = table_.find(input);
  if (it == table_.end()) return false;
  it->second.output = output;
  return true;
}

}  // namespace stagesim
