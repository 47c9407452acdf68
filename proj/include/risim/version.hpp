/*
 * Copyright (c) 2026 risim authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

namespace risim {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace risim
