#pragma once

#include "skinlock/errors.hpp"

#include <doctest.h>

#include <functional>

/// Kind of the skinlock::Error thrown by fn; fails the test if none is thrown.
inline skinlock::ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const skinlock::Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return skinlock::ErrorKind::io;
}
