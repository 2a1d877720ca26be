// Copyright 2026 The PatternRank Authors.
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

#ifndef PATTERNRANK_PATTERNRANK_HPP_
#define PATTERNRANK_PATTERNRANK_HPP_

#include "patternrank/backends.hpp"
#include "patternrank/candidates.hpp"
#include "patternrank/conllu.hpp"
#include "patternrank/document.hpp"
#include "patternrank/error.hpp"
#include "patternrank/eval.hpp"
#include "patternrank/matcher.hpp"
#include "patternrank/parallel.hpp"
#include "patternrank/pattern.hpp"
#include "patternrank/pipeline.hpp"
#include "patternrank/ranker.hpp"
#include "patternrank/singlerank.hpp"
#include "patternrank/tagger.hpp"
#include "patternrank/tokenizer.hpp"

#endif  // PATTERNRANK_PATTERNRANK_HPP_
