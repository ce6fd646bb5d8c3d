#include "stagesim/prefix_set.hpp"

#include <algorithm>
#include <functional>

#include "stagesim/errors.hpp"

namespace stagesim {

std::unique_ptr<PrefixFreeSet::Node> PrefixFreeSet::clone(const Node* n) {
  if (n == nullptr) return nullptr;
  auto copy = std::make_unique<Node>();
  copy->member = n->member;
  copy->subtree_weight = n->subtree_weight;
  copy->child[0] = clone(n->child[0].get());
  copy->child[1] = clone(n->child[1].get());
  return copy;
}

PrefixFreeSet::PrefixFreeSet(const PrefixFreeSet& other)
    : root_(clone(other.root_.get())) {}

PrefixFreeSet& PrefixFreeSet::operator=(const PrefixFreeSet& other) {
  if (this != &other) root_ = clone(other.root_.get());
  return *this;
}

void PrefixFreeSet::insert(const BitString& sigma) {
  if (!root_) root_ = std::make_unique<Node>();
  Node* n = root_.get();
  std::vector<Node*> path{n};
  for (std::size_t i = 0; i < sigma.length(); ++i) {
    if (n->member) {
      throw PrefixConflictError("member " + sigma.prefix(i).str() +
                                " is a prefix of " + sigma.str());
    }
    int b = sigma.bit(i) ? 1 : 0;
    if (!n->child[b]) n->child[b] = std::make_unique<Node>();
    n = n->child[b].get();
    path.push_back(n);
  }
  if (n->member) {
    throw PrefixConflictError("duplicate member " + sigma.str());
  }
  if (n->child[0] || n->child[1]) {
    throw PrefixConflictError("a member extends " + sigma.str());
  }
  n->member = true;
  Dyadic w = Dyadic::pow2_neg(sigma.length());
  for (Node* p : path) p->subtree_weight += w;
}

bool PrefixFreeSet::contains(const BitString& sigma) const {
  const Node* n = root_.get();
  for (std::size_t i = 0; n != nullptr && i < sigma.length(); ++i) {
    n = n->child[sigma.bit(i) ? 1 : 0].get();
  }
  return n != nullptr && n->member;
}

bool PrefixFreeSet::contains_prefix_of(const BitString& sigma) const {
  const Node* n = root_.get();
  for (std::size_t i = 0; n != nullptr; ++i) {
    if (n->member) return true;
    if (i >= sigma.length()) return false;
    n = n->child[sigma.bit(i) ? 1 : 0].get();
  }
  return false;
}

bool PrefixFreeSet::is_empty() const {
  return root_ == nullptr || root_->subtree_weight.is_zero();
}

std::size_t PrefixFreeSet::size() const { return members().size(); }

const Dyadic& PrefixFreeSet::weight() const {
  return root_ ? root_->subtree_weight : zero_;
}

Dyadic PrefixFreeSet::recompute_weight() const {
  Dyadic total;
  for (const BitString& m : members()) {
    total += Dyadic::pow2_neg(m.length());
  }
  return total;
}

std::vector<BitString> PrefixFreeSet::members() const {
  std::vector<BitString> out;
  std::function<void(const Node*, std::string&)> walk =
      [&](const Node* n, std::string& acc) {
        if (n == nullptr) return;
        if (n->member) out.emplace_back(acc);
        for (int b = 0; b < 2; ++b) {
          if (n->child[b]) {
            acc.push_back(b ? '1' : '0');
            walk(n->child[b].get(), acc);
            acc.pop_back();
          }
        }
      };
  std::string acc;
  walk(root_.get(), acc);
  return out;
}

bool PrefixFreeSet::is_subset_of(const PrefixFreeSet& other) const {
  for (const BitString& m : members()) {
    if (!other.contains(m)) return false;
  }
  return true;
}

PrefixFreeSet minimal_strings(const std::vector<BitString>& strings) {
  std::vector<BitString> sorted = strings;
  std::sort(sorted.begin(), sorted.end(),
            [](const BitString& a, const BitString& b) {
              if (a.length() != b.length()) return a.length() < b.length();
              return a < b;
            });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  PrefixFreeSet out;
  for (const BitString& s : sorted) {
    if (!out.contains_prefix_of(s)) out.insert(s);
  }
  return out;
}

}  // namespace stagesim
