// Copyright 2026  salign authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "salign/align.hpp"
#include "salign/dsp.hpp"
#include "salign/error.hpp"
#include "salign/fft.hpp"
#include "salign/gd.hpp"
#include "salign/hybrid.hpp"
#include "salign/manifest.hpp"
#include "salign/metrics.hpp"
#include "salign/runner.hpp"
#include "salign/sbsf.hpp"
#include "salign/svg.hpp"
#include "salign/wav.hpp"
