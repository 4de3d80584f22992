// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

namespace rfseeker {

inline constexpr const char *kVersion = "0.1.0";

// on-disk format revisions, bumped whenever a layout changes
inline constexpr int kGridFormatVersion = 1;
inline constexpr int kCheckpointFormatVersion = 1;
inline constexpr int kNormalizerFormatVersion = 1;
inline constexpr int kMetricsFormatVersion = 1;

} // namespace rfseeker
