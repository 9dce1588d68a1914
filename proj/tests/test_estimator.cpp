#include <doctest.h>

TEST_SUITE("estimator") {}
