// Copyright 2026 The astsim Authors. All Rights Reserved.
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

#include "astsim/ast.hpp"
#include "astsim/ast_json.hpp"
#include "astsim/baselines.hpp"
#include "astsim/calibration.hpp"
#include "astsim/config.hpp"
#include "astsim/corpus.hpp"
#include "astsim/error.hpp"
#include "astsim/metrics.hpp"
#include "astsim/mini_lang.hpp"
#include "astsim/optim.hpp"
#include "astsim/params.hpp"
#include "astsim/search.hpp"
#include "astsim/siamese.hpp"
#include "astsim/tensor.hpp"
#include "astsim/tree_lstm.hpp"
#include "astsim/util.hpp"
