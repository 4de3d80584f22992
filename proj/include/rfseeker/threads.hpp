// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

namespace rfseeker {

// Apply the RFSEEKER_THREADS cap to the OpenMP runtime. A missing or
// malformed value leaves the runtime default in place. Returns the worker
// count in effect. Safe to call when built without OpenMP (returns 1).
int init_threads();

// current effective worker count
int thread_count();

} // namespace rfseeker
