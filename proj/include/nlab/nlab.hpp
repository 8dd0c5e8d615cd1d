// Copyright 2026 The nlab Authors
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

#ifndef NLAB_NLAB_HPP
#define NLAB_NLAB_HPP

#include "nlab/error.hpp"
#include "nlab/matkernel.hpp"
#include "nlab/qobjects.hpp"
#include "nlab/dilation.hpp"
#include "nlab/instruments.hpp"
#include "nlab/infometrics.hpp"
#include "nlab/relations.hpp"
#include "nlab/scenarios.hpp"
#include "nlab/io.hpp"
#include "nlab/sweep.hpp"

#endif
