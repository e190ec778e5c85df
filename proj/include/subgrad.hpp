// Copyright 2026 The Authors.
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

#include "subgrad/autodiff.hpp"
#include "subgrad/data.hpp"
#include "subgrad/double_greedy.hpp"
#include "subgrad/errors.hpp"
#include "subgrad/greedy.hpp"
#include "subgrad/metrics.hpp"
#include "subgrad/oracle.hpp"
#include "subgrad/random.hpp"
#include "subgrad/set_functions.hpp"
#include "subgrad/subset.hpp"
#include "subgrad/train.hpp"
