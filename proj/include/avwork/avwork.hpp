/*
 * Copyright 2026 The avwork Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "avwork/attribution.hpp"
#include "avwork/config.hpp"
#include "avwork/csv.hpp"
#include "avwork/error.hpp"
#include "avwork/hash.hpp"
#include "avwork/intensity.hpp"
#include "avwork/io.hpp"
#include "avwork/monte_carlo.hpp"
#include "avwork/pipeline.hpp"
#include "avwork/series.hpp"
#include "avwork/spatial.hpp"
#include "avwork/trace.hpp"
#include "avwork/trace_reader.hpp"
#include "avwork/workload_model.hpp"
