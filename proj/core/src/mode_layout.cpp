#include "phonon_forge/mode_layout.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "phonon_forge/error.hpp"

namespace phonon_forge {

ModeLayout::ModeLayout(std::vector<Mode> modes) : modes_(std::move(modes)) {
  if (modes_.empty()) fail(ErrorCode::invalid_dimension, "layout needs at least one mode");
  std::set<std::string> seen;
  for (const auto& m : modes_) {
    if (m.dim == 0) fail(ErrorCode::invalid_dimension, "mode '" + m.label + "' has zero dimension");
    if (!seen.insert(m.label).second) fail(ErrorCode::validation, "duplicate mode label '" + m.label + "'");
    total_dim_ *= m.dim;
  }
}

ModeLayout ModeLayout::single(std::string label, std::size_t dim) {
  return ModeLayout({Mode{std::move(label), dim}});
}

bool ModeLayout::contains(std::string_view label) const noexcept {
  return std::any_of(modes_.begin(), modes_.end(), [&](const Mode& m) { return m.label == label; });
}

std::size_t ModeLayout::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (modes_[i].label == label) return i;
  }
  fail(ErrorCode::unknown_label, "no mode labelled '" + std::string(label) + "' in layout " + describe());
}

std::size_t ModeLayout::stride(std::size_t index) const {
  std::size_t s = 1;
  for (std::size_t i = index + 1; i < modes_.size(); ++i) s *= modes_[i].dim;
  return s;
}

ModeLayout ModeLayout::sublayout(const std::vector<std::string>& keep) const {
  if (keep.empty()) fail(ErrorCode::validation, "empty keep set");
  for (const auto& k : keep) index_of(k);
  std::vector<Mode> kept;
  for (const auto& m : modes_) {
    if (std::find(keep.begin(), keep.end(), m.label) != keep.end()) kept.push_back(m);
  }
  return ModeLayout(std::move(kept));
}

std::string ModeLayout::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    if (i) os << ',';
    os << modes_[i].label << ':' << modes_[i].dim;
  }
  return os.str();
}

}  // namespace phonon_forge
