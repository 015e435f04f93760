#include <catch2/catch_amalgamated.hpp>

#include "lgq/lgq.hpp"

TEST_CASE("stub io") { CHECK(true); }
