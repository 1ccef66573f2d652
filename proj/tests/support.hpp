#pragma once

#include <doctest.h>

#include "slider/errors.hpp"

namespace slider::testing {

/// Runs fn and returns the code of the slider::Error it throws.
template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a slider::Error");
  return ErrorCode::Io;
}

}  // namespace slider::testing
