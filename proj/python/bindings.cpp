// SPDX-License-Identifier: MIT
#include <pybind11/pybind11.h>

namespace py = pybind11;

PYBIND11_MODULE(_qwkb, m) {
  m.doc() = "bindings not implemented yet";
}
