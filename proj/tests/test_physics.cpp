#include <doctest.h>

TEST_SUITE("physics") {}
