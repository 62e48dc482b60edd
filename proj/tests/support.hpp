// support.hpp — shared helpers for the test binaries: deterministic random
// matrices/states (raw mt19937 draws so every run and platform sees the same
// bits) and small utilities for asserting on exception messages.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include "lvn/core.hpp"

namespace support {

// Uniform draw in [-0.5, 0.5) from the raw 32-bit stream; avoids
// distribution objects whose output is implementation-defined.
inline double unit_draw(std::mt19937& gen) {
  return gen() * (1.0 / 4294967296.0) - 0.5;
}

inline lvn::Matrix random_hermitian(int dim, std::uint32_t seed) {
  std::mt19937 gen(seed);
  lvn::Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      m(i, j) = lvn::complexd(unit_draw(gen), unit_draw(gen));
  return 0.5 * (m + m.adjoint());
}

inline lvn::Vector random_state(int dim, std::uint32_t seed) {
  std::mt19937 gen(seed);
  lvn::Vector v(dim);
  for (int i = 0; i < dim; ++i)
    v[i] = lvn::complexd(unit_draw(gen), unit_draw(gen));
  v /= v.norm();
  return v;
}

inline bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

// Runs fn, expecting it to throw E; returns the message (empty if nothing
// was thrown, so a missing throw also fails the message assertion).
template <typename E, typename Fn>
std::string thrown_message(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const E& e) {
    return e.what();
  } catch (...) {
    return "(wrong exception type)";
  }
  return "";
}

}  // namespace support
