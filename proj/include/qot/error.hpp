#pragma once

#include <stdexcept>

namespace qot {

/// Rejected caller input (bad slot, unnormalized state, dimension mismatch).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A delay would push photon amplitude past the last slot of the window.
class WindowOverflow : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace qot
