/*
 * Copyright 2026 The SWAM Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Umbrella header for the whole library.

#ifndef SWAM_SWAM_HPP
#define SWAM_SWAM_HPP

#include "swam/common.hpp"
#include "swam/corpus.hpp"
#include "swam/embedding.hpp"
#include "swam/model.hpp"
#include "swam/train.hpp"
#include "swam/metrics.hpp"
#include "swam/explain.hpp"
#include "swam/harness.hpp"

#endif  // SWAM_SWAM_HPP
