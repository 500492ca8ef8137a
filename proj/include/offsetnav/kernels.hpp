// Copyright 2026 The offsetnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Data-parallel dense kernels used by the solver and objective.
//
// Every kernel has an OpenMP version and a serial reference in
// `kernels::serial`. Each output entry (or per-column partial) is reduced in a
// fixed order by exactly one thread, and partials are combined serially, so
// the parallel results are bit-identical to the serial ones for any thread
// count.

#include "offsetnav/model.hpp"

namespace offsetnav::kernels {

// A * A^T.
Matrix gram(const Matrix& a);
// A * B^T; A and B must have the same number of columns.
Matrix cross(const Matrix& a, const Matrix& b);
// ||Yhat - W^T X - U^T E||_F^2.
double residual_squared_norm(const Matrix& yhat, const Matrix& w, const Matrix& x,
                             const Matrix& u, const Matrix& e);

namespace serial {

Matrix gram(const Matrix& a);
Matrix cross(const Matrix& a, const Matrix& b);
double residual_squared_norm(const Matrix& yhat, const Matrix& w, const Matrix& x,
                             const Matrix& u, const Matrix& e);

}  // namespace serial

// Number of threads OpenMP would use (1 when built without OpenMP).
int max_threads();

}  // namespace offsetnav::kernels
