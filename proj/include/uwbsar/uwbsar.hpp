#pragma once

#include "uwbsar/core.hpp"
#include "uwbsar/radar_model.hpp"
#include "uwbsar/backprojection.hpp"
#include "uwbsar/simulator.hpp"
#include "uwbsar/image_post.hpp"
#include "uwbsar/image_io.hpp"
#include "uwbsar/features.hpp"
#include "uwbsar/loopclose.hpp"
#include "uwbsar/scan_log.hpp"
#include "uwbsar/config.hpp"
