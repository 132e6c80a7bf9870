#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sparse_sampler {

using MultiIndex = std::vector<int>;

/// `Given` marks a sequence kept exactly as supplied (custom files, nested
/// ladders); no sort order is implied or checked.
enum class Ordering { Lexicographic, TotalDegree, MaxDegree, Given };

enum class IndexFamily { TensorProduct, TotalDegree, HyperbolicCross, Custom };

inline constexpr std::size_t kDefaultCardinalityCap = 10'000'000;

/// Strict weak order used by reorder(). Degree orderings break ties graded-lex
/// style, so (1,0) precedes (0,1); Lexicographic is plain ascending order on
/// the raw (possibly signed) entries.
bool index_less(const MultiIndex& a, const MultiIndex& b, Ordering ordering);

/// Ordered, duplicate-free list of d-dimensional multi-indices.
///
/// Immutable after construction. `signed_entries()` marks sets built for
/// trigonometric dictionaries; for those, degrees use |iota_k|.
class MultiIndexSet {
 public:
  /// Validates dimension, duplicates and that `indices` really is sorted
  /// according to `ordering`.
  MultiIndexSet(std::size_t dimension, std::vector<MultiIndex> indices,
                Ordering ordering, IndexFamily family = IndexFamily::Custom,
                int order = -1, bool signed_entries = false);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return indices_.size(); }
  Ordering ordering() const { return ordering_; }
  IndexFamily family() const { return family_; }
  /// Generating order t, or -1 for custom sets.
  int order() const { return order_; }
  bool signed_entries() const { return signed_; }

  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  bool contains(const MultiIndex& index) const;
  /// Position of `index` in the ordered list, or size() when absent.
  std::size_t position(const MultiIndex& index) const;

  /// Largest |entry| over all indices (the 1D degree needed for evaluation).
  int max_entry() const;

  friend bool operator==(const MultiIndexSet& a, const MultiIndexSet& b);

 private:
  std::size_t dimension_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> sorted_positions_;  // lexicographic lookup table
  Ordering ordering_;
  IndexFamily family_;
  int order_;
  bool signed_;
};

MultiIndexSet gen_tensor_product(std::size_t d, int t,
                                 Ordering ordering = Ordering::TotalDegree,
                                 std::size_t cap = kDefaultCardinalityCap);
MultiIndexSet gen_total_degree(std::size_t d, int t,
                               Ordering ordering = Ordering::TotalDegree,
                               std::size_t cap = kDefaultCardinalityCap);
/// All iota with prod_k (iota_k + 1) <= t + 1.
MultiIndexSet gen_hyperbolic_cross(std::size_t d, int t,
                                   Ordering ordering = Ordering::TotalDegree,
                                   std::size_t cap = kDefaultCardinalityCap);
MultiIndexSet gen_index_set(IndexFamily family, std::size_t d, int t,
                            Ordering ordering = Ordering::TotalDegree,
                            std::size_t cap = kDefaultCardinalityCap);

/// Every sign pattern of every index of a nonnegative set.
MultiIndexSet signed_variant(const MultiIndexSet& set,
                             std::size_t cap = kDefaultCardinalityCap);

bool is_lower(const MultiIndexSet& set);

MultiIndexSet reorder(const MultiIndexSet& set, Ordering ordering);

/// `previous` members first in their existing order, then the members of
/// `grown` that are new, sorted by `grown.ordering()`. Keeps the leading
/// columns of a grid QR unchanged along a nested ladder.
MultiIndexSet nested_extension(const MultiIndexSet& previous,
                               const MultiIndexSet& grown);

/// All lower sets in N_0^d with 1 <= |S| <= max_size whose members satisfy
/// `admissible`. Each set is returned sorted lexicographically.
std::vector<std::vector<MultiIndex>> enumerate_lower_sets(
    std::size_t d, std::size_t max_size,
    const std::function<bool(const MultiIndex&)>& admissible = {});

std::string to_string(Ordering ordering);
std::string to_string(IndexFamily family);
Ordering parse_ordering(const std::string& text);
IndexFamily parse_family(const std::string& text);

/// Plain-text format: "d n ordering family" then n lines of d integers.
/// The family token carries the order and sign flag, e.g.
/// "hyperbolic_cross:5" or "tensor_product:1:signed".
void write_index_set(std::ostream& out, const MultiIndexSet& set);
MultiIndexSet read_index_set(std::istream& in);
void save_index_set(const std::string& path, const MultiIndexSet& set);
MultiIndexSet load_index_set(const std::string& path);

}  // namespace sparse_sampler
