// Copyright 2026 The ocpshoot Authors
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

#include "ocpshoot/contraction.hpp"
#include "ocpshoot/errors.hpp"
#include "ocpshoot/linearization.hpp"
#include "ocpshoot/ocp_model.hpp"
#include "ocpshoot/registry.hpp"
#include "ocpshoot/riccati.hpp"
#include "ocpshoot/solvers.hpp"
