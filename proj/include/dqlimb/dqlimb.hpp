// Copyright 2026 The dqlimb Authors
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

// Umbrella header.

#include "dqlimb/dual_quaternion.hpp"
#include "dqlimb/dynamics.hpp"
#include "dqlimb/error.hpp"
#include "dqlimb/ik_solver.hpp"
#include "dqlimb/kinematics.hpp"
#include "dqlimb/limb_model.hpp"
#include "dqlimb/mlp.hpp"
#include "dqlimb/quaternion.hpp"
#include "dqlimb/rom.hpp"
#include "dqlimb/trajectory.hpp"
#include "dqlimb/verification.hpp"
