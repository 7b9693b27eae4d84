#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace phonon_forge {

struct Mode {
  std::string label;
  std::size_t dim = 0;

  friend bool operator==(const Mode&, const Mode&) = default;
};

/// Ordered registry of subsystems. The first mode is the slowest-varying
/// index, i.e. the leftmost Kronecker factor.
class ModeLayout {
 public:
  explicit ModeLayout(std::vector<Mode> modes);

  static ModeLayout single(std::string label, std::size_t dim);

  const std::vector<Mode>& modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  std::size_t total_dim() const noexcept { return total_dim_; }

  bool contains(std::string_view label) const noexcept;
  std::size_t index_of(std::string_view label) const;
  const Mode& mode(std::size_t index) const { return modes_.at(index); }
  const Mode& mode(std::string_view label) const { return modes_[index_of(label)]; }

  /// Product of the dims of modes strictly after `index` (the stride of that
  /// mode's index in a flattened basis label).
  std::size_t stride(std::size_t index) const;

  /// Kept modes in layout order, regardless of the order given.
  ModeLayout sublayout(const std::vector<std::string>& keep) const;

  /// Compact text form, e.g. "a1:2,B1:8".
  std::string describe() const;

  friend bool operator==(const ModeLayout& a, const ModeLayout& b) { return a.modes_ == b.modes_; }

 private:
  std::vector<Mode> modes_;
  std::size_t total_dim_ = 1;
};

}  // namespace phonon_forge
