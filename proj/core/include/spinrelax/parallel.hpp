// Copyright 2026 The spinrelax Project Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#pragma once

/// @file
///
/// Thin wrapper around TBB. Every parallel loop in the library writes
/// into a slot owned by its index, and any reduction happens
/// afterwards in index order, so results do not depend on the number
/// of workers.

#include <cstddef>
#include <functional>
#include <memory>

namespace spinrelax {
/// Caps the worker count for the lifetime of the object. A value of 0
/// leaves the TBB default in place.
class ThreadLimit {
public:
    explicit ThreadLimit(std::size_t threads);
    ~ThreadLimit();
    ThreadLimit(const ThreadLimit&) = delete;
    ThreadLimit& operator=(const ThreadLimit&) = delete;

private:
    struct Impl;
    std::unique_ptr<Impl> impl;
};

/// Calls body(i) for every i in [0, n), possibly concurrently.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
} // namespace spinrelax
