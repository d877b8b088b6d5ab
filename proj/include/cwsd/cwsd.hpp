// Copyright 2026 The CWSD Authors.
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

// Everything except the HTTP client (cwsd/embedding_client.hpp).

#pragma once

#include "cwsd/baseline.hpp"
#include "cwsd/builder.hpp"
#include "cwsd/classify.hpp"
#include "cwsd/common.hpp"
#include "cwsd/corpus.hpp"
#include "cwsd/embedding.hpp"
#include "cwsd/evaluate.hpp"
#include "cwsd/experiments.hpp"
#include "cwsd/sensemodel.hpp"
