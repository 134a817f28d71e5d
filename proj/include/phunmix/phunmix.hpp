#pragma once

#include "phunmix/alternating.hpp"
#include "phunmix/instance_json.hpp"
#include "phunmix/lifting.hpp"
#include "phunmix/mixsep.hpp"
#include "phunmix/oracle.hpp"
#include "phunmix/problem.hpp"
#include "phunmix/registry.hpp"
#include "phunmix/rng.hpp"
#include "phunmix/separation.hpp"
#include "phunmix/specio.hpp"
#include "phunmix/stft.hpp"
#include "phunmix/sweep.hpp"
#include "phunmix/types.hpp"
#include "phunmix/wav.hpp"
#include "phunmix/wiener.hpp"
