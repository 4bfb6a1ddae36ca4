// Copyright 2026 The IGCCF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "igccf/data.hpp"
#include "igccf/errors.hpp"
#include "igccf/graph.hpp"
#include "igccf/io.hpp"
#include "igccf/metrics.hpp"
#include "igccf/model.hpp"
#include "igccf/protocols.hpp"
#include "igccf/sweep.hpp"
#include "igccf/training.hpp"
#include "igccf/types.hpp"
