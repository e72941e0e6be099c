/*
 * Copyright 2026 The hash2vec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "hash2vec/corpus.hpp"
#include "hash2vec/embedder.hpp"
#include "hash2vec/embedding_io.hpp"
#include "hash2vec/embedding_table.hpp"
#include "hash2vec/errors.hpp"
#include "hash2vec/eval.hpp"
#include "hash2vec/hashing.hpp"
#include "hash2vec/oracle.hpp"
#include "hash2vec/query.hpp"
#include "hash2vec/statistics.hpp"
