#include "sparse_sampler/index_sets.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "sparse_sampler/types.hpp"

namespace sparse_sampler {

namespace {

long degree(const MultiIndex& index, Ordering ordering) {
  long value = 0;
  for (int e : index) {
    const long a = std::abs(e);
    if (ordering == Ordering::MaxDegree)
      value = std::max(value, a);
    else
      value += a;
  }
  return value;
}

void check_order(std::size_t d, int t) {
  if (d < 1) throw DomainError("index set dimension must be >= 1");
  if (t < 0) throw DomainError("index set order must be >= 0");
}

void sort_indices(std::vector<MultiIndex>& indices, Ordering ordering) {
  if (ordering == Ordering::Given) return;
  std::stable_sort(indices.begin(), indices.end(),
                   [ordering](const MultiIndex& a, const MultiIndex& b) {
                     return index_less(a, b, ordering);
                   });
}

std::string cap_message(const char* what, std::size_t cap) {
  return std::string(what) + " exceeds the cardinality cap of " +
         std::to_string(cap);
}

void hc_descend(std::size_t d, long budget, MultiIndex& current, std::size_t k,
                std::vector<MultiIndex>& out, std::size_t cap) {
  if (k == d) {
    if (out.size() >= cap) throw CapacityError(cap_message("hyperbolic cross", cap));
    out.push_back(current);
    return;
  }
  // (iota_k + 1) must divide into the remaining product budget.
  for (long v = 0; v + 1 <= budget; ++v) {
    current[k] = static_cast<int>(v);
    hc_descend(d, budget / (v + 1), current, k + 1, out, cap);
  }
  current[k] = 0;
}

void td_descend(std::size_t d, int remaining, MultiIndex& current, std::size_t k,
                std::vector<MultiIndex>& out) {
  if (k == d) {
    out.push_back(current);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    current[k] = v;
    td_descend(d, remaining - v, current, k + 1, out);
  }
  current[k] = 0;
}

}  // namespace

bool index_less(const MultiIndex& a, const MultiIndex& b, Ordering ordering) {
  if (ordering != Ordering::Lexicographic) {
    const long da = degree(a, ordering);
    const long db = degree(b, ordering);
    if (da != db) return da < db;
    // Graded lex: within a degree, larger leading entries come first.
    return a > b;
  }
  return a < b;
}

MultiIndexSet::MultiIndexSet(std::size_t dimension, std::vector<MultiIndex> indices,
                             Ordering ordering, IndexFamily family, int order,
                             bool signed_entries)
    : dimension_(dimension),
      indices_(std::move(indices)),
      ordering_(ordering),
      family_(family),
      order_(order),
      signed_(signed_entries) {
  if (dimension_ < 1) throw DomainError("multi-index dimension must be >= 1");
  if (indices_.empty()) throw DomainError("multi-index set must be nonempty");
  for (const auto& index : indices_) {
    if (index.size() != dimension_)
      throw ShapeError("multi-index length " + std::to_string(index.size()) +
                       " does not match dimension " + std::to_string(dimension_));
    if (!signed_ && std::any_of(index.begin(), index.end(), [](int e) { return e < 0; }))
      throw DomainError("negative entry in a nonnegative multi-index set");
  }
  for (std::size_t i = 1; ordering_ != Ordering::Given && i < indices_.size(); ++i) {
    if (index_less(indices_[i], indices_[i - 1], ordering_))
      throw FormatError("multi-index sequence is not in " + to_string(ordering_) +
                        " order at position " + std::to_string(i));
  }
  sorted_positions_.resize(indices_.size());
  std::iota(sorted_positions_.begin(), sorted_positions_.end(), std::size_t{0});
  std::sort(sorted_positions_.begin(), sorted_positions_.end(),
            [this](std::size_t a, std::size_t b) { return indices_[a] < indices_[b]; });
  for (std::size_t i = 1; i < sorted_positions_.size(); ++i) {
    if (indices_[sorted_positions_[i]] == indices_[sorted_positions_[i - 1]])
      throw FormatError("duplicate multi-index in set");
  }
}

std::size_t MultiIndexSet::position(const MultiIndex& index) const {
  auto it = std::lower_bound(
      sorted_positions_.begin(), sorted_positions_.end(), index,
      [this](std::size_t p, const MultiIndex& key) { return indices_[p] < key; });
  if (it != sorted_positions_.end() && indices_[*it] == index) return *it;
  return indices_.size();
}

bool MultiIndexSet::contains(const MultiIndex& index) const {
  return position(index) < indices_.size();
}

int MultiIndexSet::max_entry() const {
  int m = 0;
  for (const auto& index : indices_)
    for (int e : index) m = std::max(m, std::abs(e));
  return m;
}

bool operator==(const MultiIndexSet& a, const MultiIndexSet& b) {
  return a.dimension_ == b.dimension_ && a.indices_ == b.indices_ &&
         a.ordering_ == b.ordering_ && a.family_ == b.family_ &&
         a.order_ == b.order_ && a.signed_ == b.signed_;
}

MultiIndexSet gen_tensor_product(std::size_t d, int t, Ordering ordering,
                                 std::size_t cap) {
  check_order(d, t);
  std::size_t count = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (count > cap / static_cast<std::size_t>(t + 1))
      throw CapacityError(cap_message("tensor product set", cap));
    count *= static_cast<std::size_t>(t + 1);
  }
  std::vector<MultiIndex> out;
  out.reserve(count);
  MultiIndex current(d, 0);
  for (std::size_t c = 0; c < count; ++c) {
    out.push_back(current);
    for (std::size_t k = d; k-- > 0;) {
      if (current[k] < t) {
        ++current[k];
        break;
      }
      current[k] = 0;
    }
  }
  sort_indices(out, ordering);
  return MultiIndexSet(d, std::move(out), ordering, IndexFamily::TensorProduct, t);
}

MultiIndexSet gen_total_degree(std::size_t d, int t, Ordering ordering,
                               std::size_t cap) {
  check_order(d, t);
  // binomial(d + t, d) computed incrementally with an early cap check.
  double count = 1.0;
  for (std::size_t k = 1; k <= d; ++k) {
    count = count * static_cast<double>(t + k) / static_cast<double>(k);
    if (count > static_cast<double>(cap) + 0.5)
      throw CapacityError(cap_message("total degree set", cap));
  }
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(count + 0.5));
  MultiIndex current(d, 0);
  td_descend(d, t, current, 0, out);
  sort_indices(out, ordering);
  return MultiIndexSet(d, std::move(out), ordering, IndexFamily::TotalDegree, t);
}

MultiIndexSet gen_hyperbolic_cross(std::size_t d, int t, Ordering ordering,
                                   std::size_t cap) {
  check_order(d, t);
  std::vector<MultiIndex> out;
  MultiIndex current(d, 0);
  hc_descend(d, static_cast<long>(t) + 1, current, 0, out, cap);
  sort_indices(out, ordering);
  return MultiIndexSet(d, std::move(out), ordering, IndexFamily::HyperbolicCross, t);
}

MultiIndexSet gen_index_set(IndexFamily family, std::size_t d, int t,
                            Ordering ordering, std::size_t cap) {
  switch (family) {
    case IndexFamily::TensorProduct:
      return gen_tensor_product(d, t, ordering, cap);
    case IndexFamily::TotalDegree:
      return gen_total_degree(d, t, ordering, cap);
    case IndexFamily::HyperbolicCross:
      return gen_hyperbolic_cross(d, t, ordering, cap);
    case IndexFamily::Custom:
      break;
  }
  throw DomainError("custom index sets cannot be generated; load them from a file");
}

MultiIndexSet signed_variant(const MultiIndexSet& set, std::size_t cap) {
  if (set.signed_entries()) throw DomainError("set already has signed entries");
  std::vector<MultiIndex> out;
  for (const auto& index : set) {
    std::vector<std::size_t> nonzero;
    for (std::size_t k = 0; k < index.size(); ++k)
      if (index[k] != 0) nonzero.push_back(k);
    const std::size_t patterns = std::size_t{1} << nonzero.size();
    if (out.size() + patterns > cap)
      throw CapacityError(cap_message("signed index set", cap));
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      MultiIndex variant = index;
      for (std::size_t b = 0; b < nonzero.size(); ++b)
        if (mask & (std::size_t{1} << b)) variant[nonzero[b]] = -variant[nonzero[b]];
      out.push_back(std::move(variant));
    }
  }
  sort_indices(out, set.ordering());
  return MultiIndexSet(set.dimension(), std::move(out), set.ordering(), set.family(),
                       set.order(), true);
}

bool is_lower(const MultiIndexSet& set) {
  // Closure under single unit decrements (in magnitude) implies closure
  // under every componentwise decrease.
  MultiIndex probe;
  for (const auto& index : set) {
    for (std::size_t k = 0; k < index.size(); ++k) {
      if (index[k] == 0) continue;
      probe = index;
      probe[k] += index[k] > 0 ? -1 : 1;
      if (!set.contains(probe)) return false;
      if (set.signed_entries()) {
        probe = index;
        probe[k] = -probe[k];
        if (!set.contains(probe)) return false;
      }
    }
  }
  return true;
}

MultiIndexSet reorder(const MultiIndexSet& set, Ordering ordering) {
  if (ordering == Ordering::Given) return set;
  std::vector<MultiIndex> indices = set.indices();
  sort_indices(indices, ordering);
  return MultiIndexSet(set.dimension(), std::move(indices), ordering, set.family(),
                       set.order(), set.signed_entries());
}

MultiIndexSet nested_extension(const MultiIndexSet& previous,
                               const MultiIndexSet& grown) {
  if (previous.dimension() != grown.dimension())
    throw ShapeError("nested_extension: dimension mismatch");
  std::vector<MultiIndex> out = previous.indices();
  for (const auto& index : previous)
    if (!grown.contains(index))
      throw DomainError("nested_extension: previous set is not contained in the grown set");
  for (const auto& index : grown)
    if (!previous.contains(index)) out.push_back(index);
  return MultiIndexSet(grown.dimension(), std::move(out), Ordering::Given, grown.family(),
                       grown.order(), grown.signed_entries());
}

std::vector<std::vector<MultiIndex>> enumerate_lower_sets(
    std::size_t d, std::size_t max_size,
    const std::function<bool(const MultiIndex&)>& admissible) {
  if (d < 1) throw DomainError("enumerate_lower_sets: dimension must be >= 1");
  std::vector<std::vector<MultiIndex>> result;
  if (max_size == 0) return result;
  const MultiIndex origin(d, 0);
  if (admissible && !admissible(origin)) return result;

  std::set<std::vector<MultiIndex>> level{{origin}};
  for (std::size_t size = 1; size <= max_size && !level.empty(); ++size) {
    result.insert(result.end(), level.begin(), level.end());
    if (size == max_size) break;
    std::set<std::vector<MultiIndex>> next;
    for (const auto& members : level) {
      const std::set<MultiIndex> lookup(members.begin(), members.end());
      std::set<MultiIndex> candidates;
      for (const auto& m : members) {
        for (std::size_t k = 0; k < d; ++k) {
          MultiIndex c = m;
          ++c[k];
          if (lookup.count(c)) continue;
          bool addable = true;
          for (std::size_t l = 0; l < d && addable; ++l) {
            if (c[l] == 0) continue;
            MultiIndex below = c;
            --below[l];
            addable = lookup.count(below) > 0;
          }
          if (addable && (!admissible || admissible(c))) candidates.insert(std::move(c));
        }
      }
      for (const auto& c : candidates) {
        std::vector<MultiIndex> grown = members;
        grown.insert(std::upper_bound(grown.begin(), grown.end(), c), c);
        next.insert(std::move(grown));
      }
    }
    level = std::move(next);
  }
  return result;
}

std::string to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::Lexicographic:
      return "lexicographic";
    case Ordering::TotalDegree:
      return "total_degree";
    case Ordering::MaxDegree:
      return "max_degree";
    case Ordering::Given:
      return "given";
  }
  return "?";
}

std::string to_string(IndexFamily family) {
  switch (family) {
    case IndexFamily::TensorProduct:
      return "tensor_product";
    case IndexFamily::TotalDegree:
      return "total_degree";
    case IndexFamily::HyperbolicCross:
      return "hyperbolic_cross";
    case IndexFamily::Custom:
      return "custom";
  }
  return "?";
}

Ordering parse_ordering(const std::string& text) {
  if (text == "lexicographic" || text == "lex") return Ordering::Lexicographic;
  if (text == "total_degree" || text == "td") return Ordering::TotalDegree;
  if (text == "max_degree" || text == "max") return Ordering::MaxDegree;
  if (text == "given") return Ordering::Given;
  throw FormatError("unknown ordering '" + text + "'");
}

IndexFamily parse_family(const std::string& text) {
  if (text == "tensor_product" || text == "tp") return IndexFamily::TensorProduct;
  if (text == "total_degree" || text == "td") return IndexFamily::TotalDegree;
  if (text == "hyperbolic_cross" || text == "hc") return IndexFamily::HyperbolicCross;
  if (text == "custom") return IndexFamily::Custom;
  throw FormatError("unknown index family '" + text + "'");
}

void write_index_set(std::ostream& out, const MultiIndexSet& set) {
  out << set.dimension() << ' ' << set.size() << ' ' << to_string(set.ordering()) << ' '
      << to_string(set.family());
  if (set.family() != IndexFamily::Custom) out << ':' << set.order();
  if (set.signed_entries()) out << (set.family() == IndexFamily::Custom ? ":-1" : "")
                                << ":signed";
  out << '\n';
  for (const auto& index : set) {
    for (std::size_t k = 0; k < index.size(); ++k) out << (k ? " " : "") << index[k];
    out << '\n';
  }
}

MultiIndexSet read_index_set(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("index set: missing header line");
  std::istringstream hs(header);
  long d = 0;
  long n = 0;
  std::string ordering_token;
  std::string family_token;
  if (!(hs >> d >> n >> ordering_token >> family_token) || d < 1 || n < 1)
    throw FormatError("index set: malformed header '" + header + "'");

  std::vector<std::string> parts;
  std::stringstream fs(family_token);
  for (std::string part; std::getline(fs, part, ':');) parts.push_back(part);
  const IndexFamily family = parse_family(parts.at(0));
  int order = -1;
  bool is_signed = false;
  if (parts.size() >= 2) order = std::stoi(parts[1]);
  if (parts.size() >= 3) {
    if (parts[2] != "signed") throw FormatError("index set: bad family token");
    is_signed = true;
  }

  std::vector<MultiIndex> indices(static_cast<std::size_t>(n),
                                  MultiIndex(static_cast<std::size_t>(d)));
  for (auto& index : indices)
    for (auto& e : index)
      if (!(in >> e)) throw FormatError("index set: truncated body");
  return MultiIndexSet(static_cast<std::size_t>(d), std::move(indices),
                       parse_ordering(ordering_token), family, order, is_signed);
}

void save_index_set(const std::string& path, const MultiIndexSet& set) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  write_index_set(out, set);
}

MultiIndexSet load_index_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return read_index_set(in);
}

}  // namespace sparse_sampler
