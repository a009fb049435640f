/*
 * Copyright (c) 2026 The relsched authors
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

#ifndef RELSCHED_CORPUS_HPP
#define RELSCHED_CORPUS_HPP

#include <string>
#include <vector>

namespace relsched {

/// Names of the shipped benchmark programs.
std::vector<std::string> corpus_names();

/// Program document for one benchmark at its canonical size
/// (indexer: 15 threads, last_zero: 16 threads).
std::string corpus_program_json(const std::string& name);

/// Parameterized generators. Thread counts: indexer 2..15, last_zero 2..32.
std::string make_indexer_json(int threads);
std::string make_last_zero_json(int threads);

} // namespace relsched

#endif
