// Copyright 2026 The cvmdi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef CVMDI_CVMDI_HPP
#define CVMDI_CVMDI_HPP

#include "cvmdi/analysis.hpp"
#include "cvmdi/attacks.hpp"
#include "cvmdi/errors.hpp"
#include "cvmdi/gaussian.hpp"
#include "cvmdi/keyrate.hpp"
#include "cvmdi/protocol.hpp"
#include "cvmdi/simulation.hpp"

#endif  // CVMDI_CVMDI_HPP
