// Copyright 2026 The MergeDSE Authors
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

#ifndef MERGEDSE_IR_RANDOM_INPUTS_H_
#define MERGEDSE_IR_RANDOM_INPUTS_H_

#include <cstdint>
#include <random>

#include "mergedse/ir/heap.h"
#include "mergedse/ir/module.h"

namespace mergedse::ir {

struct RandomInputOptions {
  // Slots per region handed to each ptr parameter.
  uint64_t region_slots = 32;
  // Integers are drawn from [0, small_int_max] most of the time so they are
  // usable as trip counts and indices, otherwise from a wider signed range.
  int64_t small_int_max = 16;
  int64_t wide_int_bound = 64;
  // Fill regions with doubles instead of small integers.
  bool fill_doubles = false;
};

// Random arguments (and one fresh region per ptr parameter) for f.
Invocation RandomInvocation(const Function& f, std::mt19937_64& rng,
                            const RandomInputOptions& opts = {});

// Randomizes a template invocation: region slots keep their integer/double
// flavour, integer scalars are drawn from [0, template value] (so trip
// counts never exceed what the template sized its regions for), booleans
// and doubles are redrawn. Regions and argument shapes are kept.
Invocation RandomizeInvocation(const Invocation& tmpl, std::mt19937_64& rng);

}  // namespace mergedse::ir

#endif  // MERGEDSE_IR_RANDOM_INPUTS_H_
