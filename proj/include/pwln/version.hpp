// Copyright 2026 The pwln-interp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace pwln {

inline constexpr std::string_view kToolName = "pwln-interp";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace pwln
