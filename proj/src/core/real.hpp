// src/core/real.hpp

// Copyright 2026  The translab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Scalar type of every array. The library is built with double; a second
// build with TRANSLAB_REAL=long double backs the extended-precision
// finite-difference oracle in the tests.
#ifndef TRANSLAB_REAL
#define TRANSLAB_REAL double
#endif

namespace translab {
using real = TRANSLAB_REAL;
}  // namespace translab
