/*
 * Copyright 2026 The coopadmm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef COOPADMM_THREADING_HPP
#define COOPADMM_THREADING_HPP

#include <functional>

namespace coopadmm {

/// Worker count: COOP_ADMM_THREADS when set, otherwise hardware concurrency.
int default_thread_count();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; callers write results into pre-sized slots so the
/// outcome does not depend on scheduling. Exceptions are rethrown on the
/// calling thread.
void parallel_for(int count, int threads, const std::function<void(int)> &fn);

} // namespace coopadmm

#endif // COOPADMM_THREADING_HPP
