#pragma once

#include <gtest/gtest.h>

#include "pmf/error.hpp"

#define EXPECT_KIND(stmt, expected)                                            \
  do {                                                                         \
    try {                                                                      \
      stmt;                                                                    \
      ADD_FAILURE() << "expected " << pmf::to_string(expected);                \
    } catch (const pmf::Error& e) {                                            \
      EXPECT_EQ(pmf::to_string(e.kind()), pmf::to_string(expected)) << e.what(); \
    }                                                                          \
  } while (0)
