//
// Copyright 2026 The motifdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Umbrella header for the motifdp library.

#ifndef MOTIFDP_MOTIFDP_HPP_
#define MOTIFDP_MOTIFDP_HPP_

#include "motifdp/config.hpp"
#include "motifdp/dataset.hpp"
#include "motifdp/error.hpp"
#include "motifdp/graph.hpp"
#include "motifdp/hashing.hpp"
#include "motifdp/io.hpp"
#include "motifdp/metrics.hpp"
#include "motifdp/pipeline.hpp"
#include "motifdp/seed.hpp"
#include "motifdp/synthesis.hpp"

#endif  // MOTIFDP_MOTIFDP_HPP_
