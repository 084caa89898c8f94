#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rhoflow {

/// Measurement scale of a treatment or outcome column.
///
/// Binary is semantically categorical(2) but is kept distinct because only
/// binary/binary datasets are eligible for assumption-free bounds.
class VariableKind {
 public:
  enum class Tag { continuous, binary, categorical };

  static VariableKind continuous() { return VariableKind(Tag::continuous, 0); }
  static VariableKind binary() { return VariableKind(Tag::binary, 2); }
  static VariableKind categorical(int cardinality);

  /// Parses "continuous", "binary" or "categorical:K".
  static VariableKind parse(std::string_view text);

  Tag tag() const noexcept { return tag_; }
  bool is_discrete() const noexcept { return tag_ != Tag::continuous; }
  bool is_binary() const noexcept { return tag_ == Tag::binary; }
  /// Number of categories; 0 for continuous variables.
  int cardinality() const noexcept { return cardinality_; }

  std::string to_string() const;

  friend bool operator==(const VariableKind&, const VariableKind&) = default;

 private:
  VariableKind(Tag tag, int cardinality) : tag_(tag), cardinality_(cardinality) {}

  Tag tag_ = Tag::continuous;
  int cardinality_ = 0;
};

/// Paired treatment/outcome samples. Discrete columns hold integer-valued
/// doubles in [0, cardinality).
struct ObservationalDataset {
  std::vector<double> a;
  std::vector<double> y;
  VariableKind a_kind = VariableKind::continuous();
  VariableKind y_kind = VariableKind::continuous();
  std::string name;

  std::size_t size() const noexcept { return a.size(); }

  /// Throws DataError naming the first offending row (1-based data row).
  void validate() const;
};

}  // namespace rhoflow
