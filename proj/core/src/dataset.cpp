#include "rhoflow/dataset.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "rhoflow/errors.hpp"

namespace rhoflow {

VariableKind VariableKind::categorical(int cardinality) {
  if (cardinality < 2) {
    throw DomainError("categorical cardinality must be >= 2");
  }
  return VariableKind(Tag::categorical, cardinality);
}

VariableKind VariableKind::parse(std::string_view text) {
  if (text == "continuous") return continuous();
  if (text == "binary") return binary();
  constexpr std::string_view prefix = "categorical:";
  if (text.starts_with(prefix)) {
    const auto digits = text.substr(prefix.size());
    int k = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return categorical(k);
  }
  throw DomainError("unknown variable kind '" + std::string(text) +
                    "' (expected continuous, binary or categorical:K)");
}

std::string VariableKind::to_string() const {
  switch (tag_) {
    case Tag::continuous:
      return "continuous";
    case Tag::binary:
      return "binary";
    case Tag::categorical:
      return "categorical:" + std::to_string(cardinality_);
  }
  return "continuous";
}

namespace {

void check_column(const std::vector<double>& column, const VariableKind& kind, const char* label) {
  for (std::size_t i = 0; i < column.size(); ++i) {
    const double v = column[i];
    if (std::isnan(v)) {
      std::ostringstream os;
      os << "missing value in column " << label << " at row " << i + 1;
      throw DataError(os.str());
    }
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite value in column " << label << " at row " << i + 1;
      throw DataError(os.str());
    }
    if (kind.is_discrete() &&
        (v != std::floor(v) || v < 0.0 || v >= static_cast<double>(kind.cardinality()))) {
      std::ostringstream os;
      os << "value " << v << " in column " << label << " at row " << i + 1
         << " violates schema " << kind.to_string();
      throw DataError(os.str());
    }
  }
}

}  // namespace

void ObservationalDataset::validate() const {
  if (a.size() != y.size()) {
    throw DataError("treatment and outcome columns differ in length");
  }
  check_column(a, a_kind, "a");
  check_column(y, y_kind, "y");
}

}  // namespace rhoflow
