// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "synthgen/synthgen.hpp"

TEST_CASE("library headers are self-contained", "[smoke]") {
  synthgen::Rng rng(1);
  REQUIRE(rng.uniform() >= 0.0);
  REQUIRE(synthgen::kVersionString == std::string("0.1.0"));
}
