#pragma once

#include <doctest.h>

#include "signforge/error.hpp"

namespace test {

// Code of the signforge::Error thrown by fn; fails the test if none is.
template <class Fn>
signforge::ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const signforge::Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return signforge::ErrorCode::Io;
}

}  // namespace test
