// Copyright 2026 The QCA Authors
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

#pragma once

#include "qca/analysis.hpp"
#include "qca/automaton.hpp"
#include "qca/config.hpp"
#include "qca/corpus.hpp"
#include "qca/gates.hpp"
#include "qca/io.hpp"
#include "qca/linalg.hpp"
#include "qca/observables.hpp"
#include "qca/rng.hpp"
#include "qca/state.hpp"
#include "qca/version.hpp"
