#ifndef STAGESIM_MEASURE_HPP
#define STAGESIM_MEASURE_HPP

#include <optional>
#include <string>
#include <vector>

#include "stagesim/dyadic.hpp"
#include "stagesim/machine.hpp"
#include "stagesim/prefix_set.hpp"

namespace stagesim {

/// Finite partial binary function given as a pattern over {0,1,x}; 'x'
/// marks undefined positions, as does everything past the pattern end.
class PhiTable {
 public:
  PhiTable() = default;
  explicit PhiTable(std::string pattern);

  bool defined(std::size_t i) const;
  bool bit(std::size_t i) const;
  bool fully_defined_below(std::size_t n) const;
  const std::string& pattern() const { return pattern_; }

  static PhiTable constant(bool bit, std::size_t length);

 private:
  std::string pattern_;
};

/// Output class whose oracle measure is estimated at a stage:
///  TOTAL            defined at the region frontier,
///  ENDS_IN_ZEROS    frontier entry produced by a padding/zeros rule,
///  MATCHES_PHI(e)   frontier output agrees with phi_e, which must be
///                   defined along the whole output,
///  IN_ML_TEST(e,s)  the cylinder set of the stage-s test member for e.
struct ClassSpec {
  enum class Kind { Total, EndsInZeros, MatchesPhi, InMLTest };
  Kind kind = Kind::Total;
  int phi_index = 0;   // the e of MATCHES_PHI / IN_ML_TEST
  int test_stage = 0;  // the s of IN_ML_TEST
  PhiTable phi;

  static ClassSpec total();
  static ClassSpec ends_in_zeros();
  static ClassSpec matches_phi(int e, PhiTable phi);
  static ClassSpec in_ml_test(int e, int s, PhiTable phi);
  std::string name() const;
};

/// Exact measure of the oracles whose stage-`stage` computation satisfies
/// the class predicate, evaluated over the machine's per-region definition
/// frontier. Throws HorizonExceededError for stages past the machine
/// horizon.
Dyadic stage_measure(const MonotoneMachine& m, const ClassSpec& c, int stage);

/// Measure of streams with no table entry at their region frontier (the
/// exact complement of TOTAL at the same stage).
Dyadic stage_undefined_measure(const MonotoneMachine& m, int stage);

/// The stage-(s+1) test member for phi: all strings of length 2^{s+1}-1
/// whose last block (positions [2^s-1, 2^{s+1}-1)) follows phi, when phi
/// is fully defined below 2^{s+1}; the empty set otherwise. Materializes
/// the set; only valid at desk scale (s <= 4).
PrefixFreeSet ml_test_member(int e, int s, const PhiTable& phi);

/// Exact weight of ml_test_member without materializing it: 2^{-2^s} for
/// fully defined phi, 0 otherwise.
Dyadic ml_test_weight(int e, int s, const PhiTable& phi);

struct StageMeasureTrace {
  std::string machine_id;
  std::string class_name;
  std::vector<Dyadic> measures;                 // index = stage
  std::vector<std::optional<Dyadic>> targets;   // optional aligned targets

  int horizon() const { return static_cast<int>(measures.size()) - 1; }
  void write_csv(std::ostream& out) const;
};

StageMeasureTrace compute_trace(const MonotoneMachine& m, const ClassSpec& c,
                                int horizon);

struct SpliceViolation {
  int stage = 0;
  Dyadic spliced_measure;
  Dyadic recombined;  // outer + 2^{-e} inner
};

struct SpliceReport {
  std::string class_name;
  std::vector<SpliceViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Per-stage check that measure(spliced) = measure(outer) + 2^{-e} *
/// measure(inner), exactly, for the given class.
SpliceReport verify_splice_identity(const MonotoneMachine& spliced,
                                    const MonotoneMachine& inner,
                                    const MonotoneMachine& outer, int e,
                                    const ClassSpec& c);

}  // namespace stagesim

#endif  // STAGESIM_MEASURE_HPP
