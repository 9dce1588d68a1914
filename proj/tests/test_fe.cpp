#include <doctest.h>

TEST_SUITE("fe") {}
