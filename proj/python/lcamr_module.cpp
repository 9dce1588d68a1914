#include <pybind11/pybind11.h>
PYBIND11_MODULE(lcamr, m) { m.doc() = "stub"; }
