#pragma once

// shared test helpers

#include <functional>
#include <string>

namespace ddsim::testing {

// what() of the exception thrown by f, empty if nothing was thrown
inline std::string thrown(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace ddsim::testing
