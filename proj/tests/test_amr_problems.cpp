#include <doctest.h>

TEST_SUITE("amr_problems") {}
