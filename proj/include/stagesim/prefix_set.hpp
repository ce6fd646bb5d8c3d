#ifndef STAGESIM_PREFIX_SET_HPP
#define STAGESIM_PREFIX_SET_HPP

#include <memory>
#include <vector>

#include "stagesim/bitstring.hpp"
#include "stagesim/dyadic.hpp"

namespace stagesim {

/// A prefix-free family of bit strings stored as a binary trie. Every node
/// caches the weight sum 2^{-|sigma|} over the members in its subtree, so
/// the total weight is O(1) to read and stays exact under insertion.
/// Value semantics: copying clones the trie.
class PrefixFreeSet {
 public:
  PrefixFreeSet() = default;
  PrefixFreeSet(const PrefixFreeSet& other);
  PrefixFreeSet& operator=(const PrefixFreeSet& other);
  PrefixFreeSet(PrefixFreeSet&&) noexcept = default;
  PrefixFreeSet& operator=(PrefixFreeSet&&) noexcept = default;

  /// Throws PrefixConflictError when sigma is compatible with a member.
  void insert(const BitString& sigma);

  bool contains(const BitString& sigma) const;
  /// True when some member is a prefix of sigma (inclusive).
  bool contains_prefix_of(const BitString& sigma) const;
  bool is_empty() const;
  std::size_t size() const;

  /// Cached total weight Sum 2^{-|sigma|}; equals the measure of the union
  /// of member cylinders by prefix-freeness.
  const Dyadic& weight() const;
  /// Recomputes the weight from the members, ignoring the cache.
  Dyadic recompute_weight() const;

  /// Members in lexicographic order.
  std::vector<BitString> members() const;
  bool is_subset_of(const PrefixFreeSet& other) const;

  bool operator==(const PrefixFreeSet& other) const {
    return members() == other.members();
  }

 private:
  struct Node {
    bool member = false;
    Dyadic subtree_weight;
    std::unique_ptr<Node> child[2];
  };

  static std::unique_ptr<Node> clone(const Node* n);

  std::unique_ptr<Node> root_;
  Dyadic zero_;
};

/// The subset of prefix-minimal strings, as a prefix-free set.
PrefixFreeSet minimal_strings(const std::vector<BitString>& strings);

inline Dyadic set_measure(const PrefixFreeSet& s) { return s.weight(); }

}  // namespace stagesim

#endif  // STAGESIM_PREFIX_SET_HPP
