#pragma once

#include <array>
#include <string>
#include <vector>

#include "ccbif/equations.h"
#include "ccbif/interval.h"

namespace ccbif {

enum class GroupId { D6, Klein4 };
std::string to_string(GroupId g);

// Permutation of the six distances; (λ₀, μ) are fixed in the 8-variable form.
// Acting on x gives y with y[i] = x[perm[i]].
struct GroupElement {
  GroupId group = GroupId::D6;
  std::string label;
  std::array<std::size_t, 6> perm{};

  std::vector<std::size_t> perm8() const;  // on (λ₀, μ, r...)
  std::vector<std::size_t> permutation(std::size_t dim) const;
  bool is_identity() const;
};

struct Subgroup {
  std::string label;                // e.g. "{E,g3}"
  std::vector<std::string> elements;
};

class Group {
 public:
  static const Group& d6();
  static const Group& klein4();
  static const Group& for_pattern(MassPattern p);

  GroupId id() const { return id_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<GroupElement>& elements() const { return elements_; }
  const GroupElement& element(const std::string& label) const;
  // Label of a∘b computed from the permutations.
  std::string compose(const std::string& a, const std::string& b) const;
  // The reference multiplication table, row a, column b.
  const std::vector<std::vector<std::string>>& table() const { return table_; }
  const std::vector<Subgroup>& subgroups() const { return subgroups_; }

 private:
  GroupId id_;
  std::vector<GroupElement> elements_;
  std::vector<std::vector<std::string>> table_;
  std::vector<Subgroup> subgroups_;
};

std::vector<double> act(const GroupElement& g, const std::vector<double>& x);
Box act(const GroupElement& g, const Box& x);

struct EquivarianceReport {
  bool equivariant = true;
  // For each element: Π_g with F_i∘Φ_g = F_{Π_g(i)}, empty if none.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> equation_perms;
  std::vector<std::pair<std::string, std::size_t>> offending;  // (g, equation)
};

EquivarianceReport check_equivariance(const PolySystem& sys, const Group& group);

struct IsotropyTag {
  std::string label;  // subgroup label, e.g. "trivial", "{E,g3}", "D6"
  std::vector<std::string> elements;
  double tolerance = 0;  // 0 for interval certification
  std::size_t order() const { return elements.size(); }
};

IsotropyTag isotropy(const std::vector<double>& x, const Group& group, double tol = 1e-9);
// Rigorous variant: enclosure holds the unique zero of an equivariant system in unique_box.
// g is in the isotropy iff Φ_g(enclosure) ⊆ unique_box; g is excluded iff Φ_g(enclosure) ∩ enclosure = ∅.
IsotropyTag isotropy_certified(const Box& enclosure, const Box& unique_box, const Group& group);

struct Orbit {
  std::vector<double> representative;  // lexicographically smallest member
  std::size_t size = 0;
  std::vector<std::size_t> members;    // indices into the input list
  IsotropyTag isotropy;
};

std::vector<Orbit> orbit_dedup(const std::vector<std::vector<double>>& solutions, const Group& group,
                               double tol = 1e-6);

}  // namespace ccbif
